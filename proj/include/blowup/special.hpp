#pragma once

#include <utility>
#include <vector>

// The test functions phi1(x) = integral of e^{x.w} over the unit sphere and
// psi1(x,t) = phi1(x) e^{-t}, plus checks of their defining eigen-relation
// and growth bound.
namespace blowup::special {

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// Area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

class Phi1Evaluator {
public:
    // quadrature_nodes must be even and >= 64.
    explicit Phi1Evaluator(int n, int quadrature_nodes = 256);

    int dimension() const noexcept { return n_; }
    int quadrature_nodes() const noexcept { return nodes_; }

    // phi1 as a function of r = |x|. n = 2 uses the periodic trapezoid rule
    // on the angular integral; n >= 3 uses Gauss-Legendre on the polar-angle
    // form c_n * int_0^pi e^{r cos(theta)} sin^{n-2}(theta) dtheta.
    double phi1(double r) const;

    double psi1(double r, double t) const;

    struct GrowthReport {
        double max_ratio = 0.0;  // empirical constant in the growth bound
        bool monotone_ok = false; // last-decile max does not exceed the earlier max
        double ratio_at_r_max = 0.0;
    };

    // Samples ratio(r) = phi1(r) e^{-r} (1+r)^{(n-1)/2} on [0, r_max] and
    // reports its maximum plus a no-divergence-trend verdict.
    GrowthReport check_growth_bound(double r_max, int samples = 512) const;

    // |D2_h phi1(r) + ((n-1)/r) D_h phi1(r) - phi1(r)| with centered
    // differences; O(h^2) because phi1 solves phi'' + ((n-1)/r) phi' = phi.
    double eigen_residual(double r, double h) const;

private:
    int n_;
    int nodes_;
    // Prebaked abscissa data: cos(theta_k) and combined weights.
    std::vector<double> cos_theta_;
    std::vector<double> weight_;
};

} // namespace blowup::special
