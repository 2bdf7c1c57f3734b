#include "ufe/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace ufe {
namespace {

// Cyclic Jacobi rotations for a small dense symmetric matrix; returns
// eigenvalues and the first component of each normalized eigenvector.
void symmetric_eigen_first_components(std::vector<double> a, int n, std::vector<double>& eval,
                                      std::vector<double>& first)
{
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        v[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off += a[p * n + q] * a[p * n + q];
        if (off < 1e-32)
            break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300)
                    continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
    eval.resize(n);
    first.resize(n);
    for (int i = 0; i < n; ++i) {
        eval[i] = a[i * n + i];
        first[i] = v[i]; // row 0, column i
    }
}

} // namespace

double QuadRule::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void QuadRule::append(const QuadRule& other)
{
    nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
    weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    normals.insert(normals.end(), other.normals.begin(), other.normals.end());
    exactness_degree = empty() ? other.exactness_degree : std::min(exactness_degree, other.exactness_degree);
}

void gauss_jacobi_01(int npoints, int alpha, std::vector<double>& nodes, std::vector<double>& weights)
{
    const int n = npoints;
    const double a = alpha, b = 0.0;
    std::vector<double> jm(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        jm[k * n + k] = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
        if (k + 1 < n) {
            const double kk = k + 1;
            const double t = 2.0 * kk + a + b;
            const double beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (t * t * (t + 1.0) * (t - 1.0));
            jm[k * n + k + 1] = jm[(k + 1) * n + k] = std::sqrt(beta);
        }
    }
    std::vector<double> eval, first;
    symmetric_eigen_first_components(std::move(jm), n, eval, first);
    const double mu0 = std::pow(2.0, a + b + 1.0) / (a + 1.0); // integral of (1-x)^a on [-1,1]
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return eval[i] < eval[j]; });
    nodes.resize(n);
    weights.resize(n);
    const double scale = std::pow(2.0, -(a + 1.0));
    for (int i = 0; i < n; ++i) {
        const int j = order[i];
        nodes[i] = 0.5 * (1.0 + eval[j]);
        weights[i] = scale * mu0 * first[j] * first[j];
    }
}

const BarycentricRule& barycentric_rule(int dim, int degree)
{
    if (dim < 1 || dim > 3)
        throw InvalidArgument("quadrature dimension must be 1, 2 or 3");
    if (degree < 1)
        throw InvalidArgument("quadrature degree must be >= 1");
    if (degree > max_rule_degree)
        throw UnsupportedDegree("quadrature degree " + std::to_string(degree) + " exceeds the table cap of " +
                                std::to_string(max_rule_degree));

    static std::mutex mutex;
    static std::map<std::pair<int, int>, BarycentricRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find({dim, degree}); it != cache.end())
        return it->second;

    const int n = (degree + 2) / 2;
    BarycentricRule r;
    r.dim = dim;
    r.degree = degree;
    std::array<std::vector<double>, 3> s, w;
    for (int d = 0; d < dim; ++d)
        gauss_jacobi_01(n, dim - 1 - d, s[d], w[d]);

    double factorial = 1.0;
    for (int d = 2; d <= dim; ++d)
        factorial *= d;

    auto push = [&](std::array<double, 3> x, double weight) {
        const double l0 = 1.0 - x[0] - x[1] - x[2];
        r.bary.push_back(l0);
        for (int d = 0; d < dim; ++d)
            r.bary.push_back(x[d]);
        r.weights.push_back(weight * factorial);
    };
    if (dim == 1) {
        for (int i = 0; i < n; ++i)
            push({s[0][i], 0.0, 0.0}, w[0][i]);
    } else if (dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                push({s[0][i], s[1][j] * (1.0 - s[0][i]), 0.0}, w[0][i] * w[1][j]);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const double x = s[0][i];
                    const double y = s[1][j] * (1.0 - x);
                    const double z = s[2][k] * (1.0 - x) * (1.0 - s[1][j]);
                    push({x, y, z}, w[0][i] * w[1][j] * w[2][k]);
                }
    }
    return cache.emplace(std::make_pair(dim, degree), std::move(r)).first->second;
}

QuadRule reference_simplex_rule(int dim, int degree)
{
    const BarycentricRule& br = barycentric_rule(dim, degree);
    std::array<Point, 4> v{};
    for (int d = 0; d < dim; ++d)
        v[d + 1][d] = 1.0;
    double measure = 1.0;
    for (int d = 2; d <= dim; ++d)
        measure /= d;
    QuadRule out;
    map_rule(br, std::span<const Point>(v.data(), dim + 1), measure, out);
    out.exactness_degree = degree;
    return out;
}

void map_rule(const BarycentricRule& rule, std::span<const Point> vertices, double measure, QuadRule& out)
{
    const int nb = rule.dim + 1;
    const std::size_t nq = rule.size();
    out.nodes.reserve(out.nodes.size() + nq);
    out.weights.reserve(out.weights.size() + nq);
    for (std::size_t q = 0; q < nq; ++q) {
        const double* l = rule.bary.data() + q * nb;
        Point x{0.0, 0.0, 0.0};
        for (int i = 0; i < nb; ++i)
            x = x + l[i] * vertices[i];
        out.nodes.push_back(x);
        out.weights.push_back(rule.weights[q] * measure);
    }
    out.exactness_degree = rule.degree;
}

double simplex_measure(std::span<const Point> v)
{
    switch (v.size()) {
    case 2:
        return norm(v[1] - v[0]);
    case 3:
        return 0.5 * norm(cross(v[1] - v[0], v[2] - v[0]));
    case 4:
        return std::abs(dot(cross(v[1] - v[0], v[2] - v[0]), v[3] - v[0])) / 6.0;
    default:
        return 1.0;
    }
}

} // namespace ufe
