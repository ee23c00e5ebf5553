#include "jointloss/quadrature/rules.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "jointloss/errors.hpp"

namespace jointloss::quadrature {

namespace {

// Golub-Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes,
// squared first eigenvector components the normalized weights.
Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("golub_welsch: tridiagonal eigenproblem failed", 0.0, 0.0);
    }
    const auto n = diag.size();
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        rule.weights[i] = v * v;
        total += rule.weights[i];
    }
    for (auto& w : rule.weights) w /= total;
    return rule;
}

// Rules are reused across many density evaluations; memoize by (kind, n, alpha).
using Key = std::pair<int, std::pair<int, double>>;
std::mutex cache_mutex;
std::map<Key, Rule> cache;

template <class Build>
Rule cached(int kind, int n, double alpha, Build build) {
    const Key key{kind, {n, alpha}};
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Rule rule = build();
    std::lock_guard lock(cache_mutex);
    return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace

Rule gauss_laguerre_rule(int n, double alpha) {
    if (n < 1) throw DomainError("gauss_laguerre_rule: n must be >= 1");
    if (!(alpha > -1.0)) throw DomainError("gauss_laguerre_rule: alpha must exceed -1");
    return cached(0, n, alpha, [&] {
        Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
        for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + alpha + 1.0;
        for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(i * (i + alpha));
        return golub_welsch(diag, off);
    });
}

Rule gauss_hermite_rule(int n) {
    if (n < 1) throw DomainError("gauss_hermite_rule: n must be >= 1");
    return cached(1, n, 0.0, [&] {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(std::max(n - 1, 0));
        for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(0.5 * i);
        Rule r = golub_welsch(diag, off);
        // symmetrize: exact zero at the center, mirrored nodes
        for (int i = 0; i < n / 2; ++i) {
            const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
            const double w = 0.5 * (r.weights[n - 1 - i] + r.weights[i]);
            r.nodes[i] = -x;
            r.nodes[n - 1 - i] = x;
            r.weights[i] = r.weights[n - 1 - i] = w;
        }
        if (n % 2 == 1) r.nodes[n / 2] = 0.0;
        return r;
    });
}

Rule chi_squared_rule(int n, double dof) {
    if (!(dof > 0.0)) throw DomainError("chi_squared_rule: dof must be positive");
    Rule r = gauss_laguerre_rule(n, 0.5 * dof - 1.0);
    for (auto& x : r.nodes) x *= 2.0;
    return r;
}

Rule common_factor_rule(int n, double n_fluct) {
    if (!(n_fluct > 0.0)) throw DomainError("common_factor_rule: n_fluct must be positive");
    Rule r = gauss_hermite_rule(n);
    const double scale = std::sqrt(2.0 / n_fluct);
    for (auto& x : r.nodes) x *= scale;
    return r;
}

}  // namespace jointloss::quadrature
