#include "blowup/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace blowup::model {

namespace {

void require_dimension(int n) {
    if (n < 2) throw std::invalid_argument("space dimension must be >= 2");
}

} // namespace

NonlinearitySpec::NonlinearitySpec(std::vector<NonlinearityTerm> terms)
    : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("nonlinearity needs at least one term");
    for (const auto& t : terms_) {
        if (t.u_exponent < 0.0 || t.ut_exponent < 0.0)
            throw std::invalid_argument("nonlinearity exponents must be >= 0");
        if (t.u_exponent + t.ut_exponent <= 1.0)
            throw std::invalid_argument("each term must have total degree > 1");
    }
}

bool NonlinearitySpec::nonnegative_on_nonneg() const noexcept {
    for (const auto& t : terms_)
        if (t.coefficient < 0.0) return false;
    return true;
}

NonlinearitySpec NonlinearitySpec::u_ut2_plus_u4() {
    return NonlinearitySpec({{1.0, 1.0, 2.0, false, false}, {1.0, 4.0, 0.0, false, false}});
}

NonlinearitySpec NonlinearitySpec::abs_ut_p_plus_abs_u_q(double p, double q) {
    return NonlinearitySpec({{1.0, 0.0, p, false, true}, {1.0, q, 0.0, true, false}});
}

NonlinearitySpec NonlinearitySpec::u4() {
    return NonlinearitySpec({{1.0, 4.0, 0.0, false, false}});
}

NonlinearitySpec NonlinearitySpec::u_ut2() {
    return NonlinearitySpec({{1.0, 1.0, 2.0, false, false}});
}

std::string to_string(Admissibility a) {
    switch (a) {
        case Admissibility::admissible: return "admissible";
        case Admissibility::p_out_of_range: return "p_out_of_range";
        case Admissibility::q_out_of_range: return "q_out_of_range";
    }
    return "?";
}

double critical_p0(int n) {
    require_dimension(n);
    return 2.0 / (n - 1) + 1.0;
}

double strauss_gamma(int n, double q) {
    require_dimension(n);
    return (n - 1) * q * q - (n + 1) * q - 2.0;
}

double strauss_q0(int n) {
    require_dimension(n);
    return (n + 1 + std::sqrt(double(n) * n + 10.0 * n - 7.0)) / (2.0 * (n - 1));
}

Admissibility admissible(const AdmissibleQuery& query) {
    require_dimension(query.n);
    const int n = query.n;
    const double p = query.p;
    const double q = query.q;

    const double p_low = std::max(1.0, 2.0 / (n - 1));
    const double p_high = 2.0 * n / (n - 1);
    if (!(p > p_low && p <= p_high)) return Admissibility::p_out_of_range;

    // For n = 2 the Sobolev bound 2n/(n-2) is vacuous.
    double q_high = 4.0 / ((n - 1) * p - 2.0) + 1.0;
    if (n > 2) q_high = std::min(q_high, 2.0 * n / (n - 2.0));
    if (!(q > 1.0 && q < q_high)) return Admissibility::q_out_of_range;

    return Admissibility::admissible;
}

double predicted_exponent(int n, double p, double q) {
    require_dimension(n);
    const double denom = 2.0 * q + 2.0 - (n - 1) * p * (q - 1.0);
    if (!(denom > 0.0))
        throw std::domain_error("lifespan exponent undefined: 2q+2-(n-1)p(q-1) <= 0");
    return 2.0 * p * (q - 1.0) / denom;
}

std::string to_string(CatalogFlag f) {
    switch (f) {
        case CatalogFlag::mean_free_data: return "int_g_zero";
        case CatalogFlag::no_u2: return "d2u_zero";
        case CatalogFlag::no_u3: return "d3u_zero";
        case CatalogFlag::no_u3_u4: return "d3u_d4u_zero";
    }
    return "?";
}

CatalogFlag catalog_flag_from_string(const std::string& s) {
    if (s == "int_g_zero") return CatalogFlag::mean_free_data;
    if (s == "d2u_zero") return CatalogFlag::no_u2;
    if (s == "d3u_zero") return CatalogFlag::no_u3;
    if (s == "d3u_d4u_zero") return CatalogFlag::no_u3_u4;
    throw std::invalid_argument("unknown catalog flag: " + s);
}

std::string to_string(LifespanOrder::Kind k) {
    switch (k) {
        case LifespanOrder::Kind::power_law: return "power_law";
        case LifespanOrder::Kind::exp_power: return "exp_power";
        case LifespanOrder::Kind::log_corrected: return "log_corrected";
        case LifespanOrder::Kind::infinite: return "infinite";
    }
    return "?";
}

namespace {

struct CatalogRow {
    // nullopt-like: flagged == false means the general row.
    bool flagged = false;
    CatalogFlag flag = CatalogFlag::no_u2;
    LifespanOrder order;
};

using Kind = LifespanOrder::Kind;

// One cell of the catalog: the general row plus the flagged refinements.
std::vector<CatalogRow> catalog_cell(int n_class, int alpha_class) {
    // n_class in {2,3,4,5(=5 and up)}, alpha_class in {1,2,3(=3 and up)}.
    if (n_class == 2 && alpha_class == 1)
        return {
            {false, {}, {Kind::log_corrected, 0.0}},
            {true, CatalogFlag::mean_free_data, {Kind::power_law, -1.0}},
            {true, CatalogFlag::no_u2, {Kind::power_law, -2.0}},
        };
    if (n_class == 2 && alpha_class == 2)
        return {
            {false, {}, {Kind::power_law, -6.0}},
            {true, CatalogFlag::no_u3, {Kind::power_law, -18.0}},
            {true, CatalogFlag::no_u3_u4, {Kind::exp_power, -2.0}},
        };
    if (n_class == 3 && alpha_class == 1)
        return {
            {false, {}, {Kind::power_law, -2.0}},
            {true, CatalogFlag::no_u2, {Kind::exp_power, -1.0}},
        };
    if (n_class == 4 && alpha_class == 1)
        return {
            {false, {}, {Kind::exp_power, -2.0}},
            {true, CatalogFlag::no_u2, {Kind::infinite, 0.0}},
        };
    // Every remaining cell is unconditionally infinite.
    return {{false, {}, {Kind::infinite, 0.0}}};
}

} // namespace

LifespanOrder lifespan_lower_bound(int n, int alpha, const std::vector<CatalogFlag>& flags) {
    require_dimension(n);
    if (alpha < 1) throw std::invalid_argument("nonlinearity order alpha must be >= 1");
    if (flags.size() > 1)
        throw std::invalid_argument("flag combination not present in the catalog");

    const int n_class = std::min(n, 5);
    const int alpha_class = std::min(alpha, 3);
    const auto cell = catalog_cell(n_class, alpha_class);

    if (flags.empty()) return cell.front().order;

    for (const auto& row : cell)
        if (row.flagged && row.flag == flags.front()) return row.order;

    throw std::invalid_argument("flag combination not present in the catalog: " +
                                to_string(flags.front()));
}

} // namespace blowup::model
