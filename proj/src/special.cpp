#include "blowup/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace blowup::special {

using std::numbers::pi;

Quadrature gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        q.weights[n - 1 - i] = q.weights[i];
    }
    return q;
}

double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

Phi1Evaluator::Phi1Evaluator(int n, int quadrature_nodes) : n_(n), nodes_(quadrature_nodes) {
    if (n < 2) throw std::invalid_argument("Phi1Evaluator: dimension must be >= 2");
    if (quadrature_nodes < 64 || quadrature_nodes % 2 != 0)
        throw std::invalid_argument("Phi1Evaluator: quadrature_nodes must be even and >= 64");

    cos_theta_.resize(nodes_);
    weight_.resize(nodes_);
    if (n_ == 2) {
        // Periodic trapezoid on theta in [0, 2pi).
        for (int k = 0; k < nodes_; ++k) {
            cos_theta_[k] = std::cos(2.0 * pi * k / nodes_);
            weight_[k] = 2.0 * pi / nodes_;
        }
    } else {
        // c_n * int_0^pi e^{r cos(theta)} sin^{n-2}(theta) dtheta with
        // c_n = |S^{n-2}|; Gauss-Legendre mapped onto [0, pi]. The polar-angle
        // integrand is entire, so node-doubling converges to machine
        // precision for every n >= 3 (the w = cos(theta) form does not once
        // (1 - w^2)^{(n-3)/2} has an endpoint branch point).
        const auto gl = gauss_legendre(nodes_);
        const double c_n = unit_sphere_area(n_ - 1);
        for (int k = 0; k < nodes_; ++k) {
            const double theta = 0.5 * pi * (gl.nodes[k] + 1.0);
            cos_theta_[k] = std::cos(theta);
            weight_[k] = c_n * 0.5 * pi * gl.weights[k] *
                         std::pow(std::sin(theta), double(n_ - 2));
        }
    }
}

double Phi1Evaluator::phi1(double r) const {
    if (r < 0.0) throw std::invalid_argument("phi1: r must be >= 0");
    double sum = 0.0;
    for (int k = 0; k < nodes_; ++k) sum += weight_[k] * std::exp(r * cos_theta_[k]);
    return sum;
}

double Phi1Evaluator::psi1(double r, double t) const { return phi1(r) * std::exp(-t); }

Phi1Evaluator::GrowthReport Phi1Evaluator::check_growth_bound(double r_max, int samples) const {
    if (!(r_max > 0.0)) throw std::invalid_argument("check_growth_bound: r_max must be > 0");
    if (samples < 16) throw std::invalid_argument("check_growth_bound: need >= 16 samples");

    const double half = 0.5 * (n_ - 1);
    double global_max = 0.0, early_max = 0.0, last_decile_max = 0.0, last = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = r_max * i / (samples - 1);
        const double ratio = phi1(r) * std::exp(-r) * std::pow(1.0 + r, half);
        global_max = std::max(global_max, ratio);
        if (r <= 0.9 * r_max)
            early_max = std::max(early_max, ratio);
        else
            last_decile_max = std::max(last_decile_max, ratio);
        last = ratio;
    }
    GrowthReport rep;
    rep.max_ratio = global_max;
    rep.monotone_ok = last_decile_max <= early_max * (1.0 + 1e-9);
    rep.ratio_at_r_max = last;
    return rep;
}

double Phi1Evaluator::eigen_residual(double r, double h) const {
    if (!(h > 0.0) || r <= h)
        throw std::invalid_argument("eigen_residual: need r > h > 0");
    const double fm = phi1(r - h), f0 = phi1(r), fp = phi1(r + h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    const double d1 = (fp - fm) / (2.0 * h);
    return std::fabs(d2 + (n_ - 1) / r * d1 - f0);
}

} // namespace blowup::special
