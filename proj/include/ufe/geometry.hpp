#pragma once

#include "ufe/mesh.hpp"
#include "ufe/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ufe {

/// Scalar field whose zero set is the boundary/interface; {phi < 0} is Omega_0.
struct LevelSet {
    std::function<double(const Point&)> phi;
    std::function<Point(const Point&)> grad; ///< optional; finite differences when empty
    std::string descriptor;
    double scale = 1.0; ///< domain length scale for the finite-difference step

    double value(const Point& x) const { return phi(x); }
    Point gradient(const Point& x) const;
};

enum class Mode { Boundary, Interface };

/// Element/face tags. In boundary mode Side0 reads as INTERIOR0 and Side1 as EXTERIOR0.
enum class Tag : std::uint8_t { Side0, Cut, Side1 };

struct DomainClassification {
    Mode mode = Mode::Boundary;
    std::vector<Tag> element_tag;
    std::vector<Tag> face_tag;
    std::vector<int> host0; ///< per element; -1 unless the element is cut
    std::vector<int> host1; ///< interface mode only
    std::vector<int> far_hosts; ///< cut elements whose host came from the second ring
    std::vector<double> vertex_phi;
    double eps_geom = 0.0;
    int sample_depth = 3;

    std::vector<int> cut_elements() const;
    int count(Tag t) const;
};

/// Classify elements and faces by sampling phi on a barycentric lattice with
/// 2^depth divisions per edge: Cut iff samples attain both signs beyond
/// eps_geom = 1e-12 * max(1, max |phi(vertex)|).
DomainClassification classify(const SimplexMesh& mesh, const LevelSet& ls, Mode mode, int depth = 3);

/// How a cut element picks its host among the admissible patch elements.
enum class HostRule {
    Nearest, ///< closest barycentre; ties go to the larger min_vertices |phi|
    Maximin, ///< largest min_vertices |phi|
};

/// Fill the host maps: for every cut element pick a host among the elements
/// of its patch with the right tag; remaining ties go to the smallest index.
/// With rings = 2 an empty patch falls back to the elements touching it.
/// Throws AssumptionViolation when no candidate exists.
void assign_hosts(const SimplexMesh& mesh, DomainClassification& cls, HostRule rule = HostRule::Nearest,
                  int rings = 2);

struct FaceCrossing {
    int face = -1;
    int crossings = 0;
};

struct AssumptionReport {
    bool pass = true;
    std::vector<FaceCrossing> cut_faces;      ///< every cut face with its crossing count
    std::vector<FaceCrossing> multi_crossing; ///< faces crossed more than once
    std::vector<int> hostless_elements;       ///< cut elements with no admissible host (any side)
};

AssumptionReport verify_assumptions(const SimplexMesh& mesh, const LevelSet& ls, const DomainClassification& cls,
                                    int face_samples = 1024);

} // namespace ufe
