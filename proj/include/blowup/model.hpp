#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

// Closed-form exponent formulas, the admissible (p, q) region for the
// combined nonlinearity |u_t|^p + |u|^q, and the catalog of sharp lifespan
// lower bounds for fully nonlinear wave equations indexed by dimension and
// nonlinearity order.
namespace blowup::model {

// One term c * u^a * u_t^b of a source F(u, u_t). Each factor is either
// signed (u^a via pow, meaningful for integer a) or absolute (|u|^a).
struct NonlinearityTerm {
    double coefficient = 1.0;
    double u_exponent = 0.0;
    double ut_exponent = 0.0;
    bool u_absolute = false;
    bool ut_absolute = false;
};

namespace detail {

// pow with small-integer fast paths; this sits in the solver's innermost
// right-hand-side loop.
inline double power(double base, double e) noexcept {
    if (e == 0.0) return 1.0;
    if (e == 1.0) return base;
    if (e == 2.0) return base * base;
    if (e == 3.0) return base * base * base;
    if (e == 4.0) {
        const double b2 = base * base;
        return b2 * b2;
    }
    return std::pow(base, e);
}

inline double factor(double x, double e, bool absolute) noexcept {
    if (e == 0.0) return 1.0;
    return power(absolute ? std::fabs(x) : x, e);
}

} // namespace detail

class NonlinearitySpec {
public:
    // Requires at least one term, exponents >= 0, and total degree
    // u_exponent + ut_exponent > 1 per term.
    explicit NonlinearitySpec(std::vector<NonlinearityTerm> terms);

    double operator()(double u, double ut) const noexcept {
        double sum = 0.0;
        for (const auto& t : terms_)
            sum += t.coefficient * detail::factor(u, t.u_exponent, t.u_absolute) *
                   detail::factor(ut, t.ut_exponent, t.ut_absolute);
        return sum;
    }

    double term_value(std::size_t i, double u, double ut) const noexcept {
        const auto& t = terms_[i];
        return t.coefficient * detail::factor(u, t.u_exponent, t.u_absolute) *
               detail::factor(ut, t.ut_exponent, t.ut_absolute);
    }

    const std::vector<NonlinearityTerm>& terms() const noexcept { return terms_; }
    std::size_t term_count() const noexcept { return terms_.size(); }

    // True when every term maps nonnegative (u, u_t) to nonnegative values.
    bool nonnegative_on_nonneg() const noexcept;

    // Presets used throughout the lab.
    static NonlinearitySpec u_ut2_plus_u4();
    static NonlinearitySpec abs_ut_p_plus_abs_u_q(double p, double q);
    static NonlinearitySpec u4();
    static NonlinearitySpec u_ut2();

private:
    std::vector<NonlinearityTerm> terms_;
};

struct AdmissibleQuery {
    int n = 2;      // space dimension, >= 2
    double p = 2.0; // > 1
    double q = 2.0; // > 1
};

enum class Admissibility {
    admissible,
    p_out_of_range, // p outside (max(1, 2/(n-1)), 2n/(n-1)]
    q_out_of_range, // q outside (1, min(4/((n-1)p-2) + 1, 2n/(n-2)))
};

std::string to_string(Admissibility a);

// Critical power for Box u = |u_t|^p: p0(n) = 2/(n-1) + 1.
double critical_p0(int n);

// The quadratic (n-1)q^2 - (n+1)q - 2 whose positive root is the Strauss
// exponent.
double strauss_gamma(int n, double q);

// Positive root of strauss_gamma(n, .): (n+1 + sqrt(n^2+10n-7)) / (2(n-1)).
double strauss_q0(int n);

Admissibility admissible(const AdmissibleQuery& query);

// Magnitude of the lifespan exponent 2p(q-1) / (2q+2 - (n-1)p(q-1)) for the
// combined nonlinearity. Throws when the denominator is not positive (the
// query is outside the theorem's range).
double predicted_exponent(int n, double p, double q);

// --- lifespan catalog -------------------------------------------------------

// Structural conditions that select the sharper rows of the catalog.
enum class CatalogFlag {
    mean_free_data, // the velocity data integrates to zero
    no_u2,          // d^2/du^2 F(0) = 0
    no_u3,          // d^3/du^3 F(0) = 0
    no_u3_u4,       // d^l/du^l F(0) = 0 for l = 3, 4
};

std::string to_string(CatalogFlag f);
CatalogFlag catalog_flag_from_string(const std::string& s);

struct LifespanOrder {
    enum class Kind {
        power_law,     // c * eps^exponent, exponent < 0
        exp_power,     // exp(c * eps^exponent), exponent < 0
        log_corrected, // c * a(eps) with a^2 eps^2 log(a+1) = 1
        infinite,
    };
    Kind kind = Kind::infinite;
    double exponent = 0.0; // meaningful for power_law / exp_power only

    bool operator==(const LifespanOrder&) const = default;
};

std::string to_string(LifespanOrder::Kind k);

// Sharp lower-bound order for the lifespan in dimension n (n >= 5 collapses
// to one row) at nonlinearity order alpha (alpha >= 3 collapses to one
// column). Flags must match a printed row exactly; the empty set selects the
// general row. Unknown combinations are rejected.
LifespanOrder lifespan_lower_bound(int n, int alpha, const std::vector<CatalogFlag>& flags = {});

} // namespace blowup::model
