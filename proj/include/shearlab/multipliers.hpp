#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "shearlab/math_util.hpp"
#include "shearlab/spectral_field.hpp"

namespace shearlab {

enum class Regime { short_time, long_time };

/// Parameters of the weighted-multiplier machinery: the ghost weights
/// W_nu, W_I, W_I_circ, W_E, the combined multiplier M, the enhanced
/// dissipation weight zeta and the full weight A = zeta * M * <k,eta>^s.
struct MultiplierSpec {
    double nu = 1e-3;
    double K = 32.0;        // ghost constant, >= 1
    double delta = 1.0 / 64.0;  // enhanced-dissipation coefficient, in (0,1)
    double s = 2.0;         // regularity, >= 2
    Regime regime = Regime::long_time;
    int echo_sum_cutoff = 128;  // |l| <= cutoff in the W_E sum

    MultiplierSpec() = default;
    MultiplierSpec(double nu_, double K_, double delta_, double s_, Regime r)
        : nu(nu_), K(K_), delta(delta_), s(s_), regime(r) {
        validate();
    }
    void validate() const {
        if (K < 1.0) throw std::invalid_argument("MultiplierSpec: K >= 1 required");
        if (delta <= 0.0 || delta >= 1.0)
            throw std::invalid_argument("MultiplierSpec: delta in (0,1) required");
        if (s < 2.0) throw std::invalid_argument("MultiplierSpec: s >= 2 required");
        if (nu <= 0.0) throw std::invalid_argument("MultiplierSpec: nu > 0 required");
    }

    double regime_boundary() const { return std::pow(nu, -1.0 / 6.0); }
    Regime regime_of(double t) const {
        return t <= regime_boundary() ? Regime::short_time : Regime::long_time;
    }
    void require_time_consistent(double t) const {
        const double tb = regime_boundary() * (1.0 + 1e-12);
        if (regime == Regime::short_time && t > tb)
            throw std::invalid_argument("MultiplierSpec: short regime but t > nu^{-1/6}");
        if (regime == Regime::long_time && t < regime_boundary() * (1.0 - 1e-12))
            throw std::invalid_argument("MultiplierSpec: long regime but t < nu^{-1/6}");
    }
};

enum class Weight { w_nu, w_I, w_I_circ, w_E };

inline const char* weight_name(Weight w) {
    switch (w) {
        case Weight::w_nu: return "W_nu";
        case Weight::w_I: return "W_I";
        case Weight::w_I_circ: return "W_I_circ";
        case Weight::w_E: return "W_E";
    }
    return "?";
}

namespace multiplier_detail {

inline bool w_nu_active(const MultiplierSpec& spec, int k) {
    double ak = std::abs(k);
    return ak > 0 && ak <= std::pow(spec.nu, -0.5);
}
inline bool w_E_active(const MultiplierSpec& spec, int k) {
    return std::abs(k) < std::pow(spec.nu, -0.5);  // 0 <= |k| < nu^{-1/2}
}

}  // namespace multiplier_detail

// --- the four ghost weights and their analytic t/eta derivatives -------------

inline double eval_W(const MultiplierSpec& spec, Weight which, double t, int k, double eta) {
    using namespace multiplier_detail;
    switch (which) {
        case Weight::w_nu: {
            if (!w_nu_active(spec, k)) return M_PI;
            double a = std::pow(spec.nu, 1.0 / 3.0) * std::pow(std::abs(k), 2.0 / 3.0) / spec.K;
            return M_PI - std::atan(a * (t - eta / k));
        }
        case Weight::w_I: {
            if (k == 0) return M_PI;
            return M_PI - std::atan((t - eta / k) / spec.K);
        }
        case Weight::w_I_circ: {
            if (spec.regime != Regime::short_time)
                throw std::invalid_argument("W_I_circ is defined for the short regime only");
            return M_PI + std::atan(2.0 * (eta - 0.5 * t) / spec.K);
        }
        case Weight::w_E: {
            if (!w_E_active(spec, k)) return M_PI;
            double sum = 0.0;
            for (int l = 1; l <= spec.echo_sum_cutoff; ++l) {
                double cp = 1.0 + std::abs(k - l) + l;
                double cm = 1.0 + std::abs(k + l) + l;
                sum += (std::atan((eta - l * t) / (spec.K * cp)) -
                        std::atan((eta + l * t) / (spec.K * cm))) /
                       (static_cast<double>(l) * l);
            }
            return M_PI + sum / (M_PI * M_PI);
        }
    }
    return M_PI;
}

/// certified bound on the truncation error of the W_E sum at cutoff L
inline double w_E_tail_bound(int cutoff) {
    // |sum_{|l|>L} ...| <= (1/pi^2)(pi/2) * 2/L
    return 1.0 / (M_PI * cutoff);
}

inline double dt_W(const MultiplierSpec& spec, Weight which, double t, int k, double eta) {
    using namespace multiplier_detail;
    switch (which) {
        case Weight::w_nu: {
            if (!w_nu_active(spec, k)) return 0.0;
            double a = std::pow(spec.nu, 1.0 / 3.0) * std::pow(std::abs(k), 2.0 / 3.0) / spec.K;
            double u = t - eta / k;
            return -a / (1.0 + a * a * u * u);
        }
        case Weight::w_I: {
            if (k == 0) return 0.0;
            double u = t - eta / k;
            return -spec.K / (spec.K * spec.K + u * u);
        }
        case Weight::w_I_circ: {
            double x = eta - 0.5 * t;
            return -spec.K / (spec.K * spec.K + 4.0 * x * x);
        }
        case Weight::w_E: {
            if (!w_E_active(spec, k)) return 0.0;
            double sum = 0.0;
            for (int l = 1; l <= spec.echo_sum_cutoff; ++l) {
                double cp = spec.K * (1.0 + std::abs(k - l) + l);
                double cm = spec.K * (1.0 + std::abs(k + l) + l);
                double xp = eta - l * t, xm = eta + l * t;
                sum += (cp / (cp * cp + xp * xp) + cm / (cm * cm + xm * xm)) / l;
            }
            return -sum / (M_PI * M_PI);
        }
    }
    return 0.0;
}

inline double deta_W(const MultiplierSpec& spec, Weight which, double t, int k, double eta) {
    using namespace multiplier_detail;
    switch (which) {
        case Weight::w_nu: {
            if (!w_nu_active(spec, k)) return 0.0;
            double a = std::pow(spec.nu, 1.0 / 3.0) * std::pow(std::abs(k), 2.0 / 3.0) / spec.K;
            double u = t - eta / k;
            return (a / k) / (1.0 + a * a * u * u);
        }
        case Weight::w_I: {
            if (k == 0) return 0.0;
            double u = t - eta / k;
            return (spec.K / k) / (spec.K * spec.K + u * u);
        }
        case Weight::w_I_circ: {
            double x = eta - 0.5 * t;
            return 2.0 * spec.K / (spec.K * spec.K + 4.0 * x * x);
        }
        case Weight::w_E: {
            if (!w_E_active(spec, k)) return 0.0;
            double sum = 0.0;
            for (int l = 1; l <= spec.echo_sum_cutoff; ++l) {
                double cp = spec.K * (1.0 + std::abs(k - l) + l);
                double cm = spec.K * (1.0 + std::abs(k + l) + l);
                double xp = eta - l * t, xm = eta + l * t;
                sum += (cp / (cp * cp + xp * xp) - cm / (cm * cm + xm * xm)) /
                       (static_cast<double>(l) * l);
            }
            return sum / (M_PI * M_PI);
        }
    }
    return 0.0;
}

// --- the combined multiplier M, zeta, A ---------------------------------------

/// M(t,k,eta): short regime: W_I_circ on the zero mode, W_I off it;
/// long regime: W_nu * W_I * W_E
inline double eval_M(const MultiplierSpec& spec, double t, int k, double eta) {
    if (spec.regime == Regime::short_time) {
        return k == 0 ? eval_W(spec, Weight::w_I_circ, t, k, eta)
                      : eval_W(spec, Weight::w_I, t, k, eta);
    }
    return eval_W(spec, Weight::w_nu, t, k, eta) * eval_W(spec, Weight::w_I, t, k, eta) *
           eval_W(spec, Weight::w_E, t, k, eta);
}

inline double dt_M(const MultiplierSpec& spec, double t, int k, double eta) {
    if (spec.regime == Regime::short_time) {
        return k == 0 ? dt_W(spec, Weight::w_I_circ, t, k, eta)
                      : dt_W(spec, Weight::w_I, t, k, eta);
    }
    double wn = eval_W(spec, Weight::w_nu, t, k, eta);
    double wi = eval_W(spec, Weight::w_I, t, k, eta);
    double we = eval_W(spec, Weight::w_E, t, k, eta);
    return dt_W(spec, Weight::w_nu, t, k, eta) * wi * we +
           wn * dt_W(spec, Weight::w_I, t, k, eta) * we +
           wn * wi * dt_W(spec, Weight::w_E, t, k, eta);
}

inline double deta_M(const MultiplierSpec& spec, double t, int k, double eta) {
    if (spec.regime == Regime::short_time) {
        return k == 0 ? deta_W(spec, Weight::w_I_circ, t, k, eta)
                      : deta_W(spec, Weight::w_I, t, k, eta);
    }
    double wn = eval_W(spec, Weight::w_nu, t, k, eta);
    double wi = eval_W(spec, Weight::w_I, t, k, eta);
    double we = eval_W(spec, Weight::w_E, t, k, eta);
    return deta_W(spec, Weight::w_nu, t, k, eta) * wi * we +
           wn * deta_W(spec, Weight::w_I, t, k, eta) * we +
           wn * wi * deta_W(spec, Weight::w_E, t, k, eta);
}

inline double eval_zeta(const MultiplierSpec& spec, double t, int k) {
    if (k == 0) return 1.0;
    double rate = spec.delta * std::pow(spec.nu, 1.0 / 3.0) *
                  (std::pow(std::abs(k), 2.0 / 3.0) + 1.0);
    return std::exp(rate * t);
}

inline double dt_zeta(const MultiplierSpec& spec, double t, int k) {
    if (k == 0) return 0.0;
    double rate = spec.delta * std::pow(spec.nu, 1.0 / 3.0) *
                  (std::pow(std::abs(k), 2.0 / 3.0) + 1.0);
    return rate * std::exp(rate * t);
}

struct MandA {
    double M = 0.0;
    double A_tilde = 0.0;  // M <k,eta>^s
    double A = 0.0;        // zeta M <k,eta>^s
};

inline MandA eval_M_and_A(const MultiplierSpec& spec, double t, int k, double eta) {
    spec.require_time_consistent(t);
    MandA out;
    out.M = eval_M(spec, t, k, eta);
    double br = sobolev_bracket(k, eta, spec.s);
    out.A_tilde = out.M * br;
    out.A = eval_zeta(spec, t, k) * out.A_tilde;
    return out;
}

/// sqrt(-dt W_iota / W_iota); zero exactly where the indicator kills the weight
enum class CkKind { ck_nu, ck_I, ck_E, ck_M };

inline double ck_weight(const MultiplierSpec& spec, CkKind iota, double t, int k, double eta) {
    double w = 0.0, dw = 0.0;
    switch (iota) {
        case CkKind::ck_nu:
            w = eval_W(spec, Weight::w_nu, t, k, eta);
            dw = dt_W(spec, Weight::w_nu, t, k, eta);
            break;
        case CkKind::ck_I:
            w = eval_W(spec, Weight::w_I, t, k, eta);
            dw = dt_W(spec, Weight::w_I, t, k, eta);
            break;
        case CkKind::ck_E:
            w = eval_W(spec, Weight::w_E, t, k, eta);
            dw = dt_W(spec, Weight::w_E, t, k, eta);
            break;
        case CkKind::ck_M:
            w = eval_M(spec, t, k, eta);
            dw = dt_M(spec, t, k, eta);
            break;
    }
    double r = -dw / w;
    return r > 0.0 ? std::sqrt(r) : 0.0;
}

// --- weighted norms -----------------------------------------------------------

enum class ExtraSymbol { one, abs_dz_one_third, sqrt_neg_lap_L, ck_nu, ck_I, ck_E, ck_M, zeta_growth };

/// || A * symbol * f ||_{L^2}: sqrt of the domain-weighted l^2 sum over
/// retained modes of |A(t,k,eta) sym(t,k,eta) f_hat(k,eta)|^2
inline double weighted_norm(const SpectralField& f, const MultiplierSpec& spec, double t,
                            ExtraSymbol extra = ExtraSymbol::one) {
    spec.require_time_consistent(t);
    const Grid& g = f.grid;
    double acc = 0.0;
    for (int iz = 0; iz < g.n_z; ++iz) {
        int k = g.k_of(iz);
        if (std::abs(k) > g.k_keep_max()) continue;
        for (int jv = 0; jv < g.n_v; ++jv) {
            int m = g.m_of(jv);
            if (std::abs(m) > g.m_keep_max()) continue;
            double c2 = std::norm(f.at(iz, jv));
            if (c2 == 0.0) continue;
            double eta = g.eta_of(jv);
            double A = eval_zeta(spec, t, k) * eval_M(spec, t, k, eta) *
                       sobolev_bracket(k, eta, spec.s);
            double sym = 1.0;
            switch (extra) {
                case ExtraSymbol::one: break;
                case ExtraSymbol::abs_dz_one_third:
                    sym = std::pow(std::abs(k), 1.0 / 3.0);
                    break;
                case ExtraSymbol::sqrt_neg_lap_L: {
                    double tilt = eta - k * t;
                    sym = std::sqrt(k * static_cast<double>(k) + tilt * tilt);
                    break;
                }
                case ExtraSymbol::ck_nu: sym = ck_weight(spec, CkKind::ck_nu, t, k, eta); break;
                case ExtraSymbol::ck_I: sym = ck_weight(spec, CkKind::ck_I, t, k, eta); break;
                case ExtraSymbol::ck_E: sym = ck_weight(spec, CkKind::ck_E, t, k, eta); break;
                case ExtraSymbol::ck_M: sym = ck_weight(spec, CkKind::ck_M, t, k, eta); break;
                case ExtraSymbol::zeta_growth: {
                    double z = eval_zeta(spec, t, k);
                    double r = dt_zeta(spec, t, k) / z;
                    sym = r > 0 ? std::sqrt(r) : 0.0;
                    break;
                }
            }
            acc += A * A * sym * sym * c2;
        }
    }
    return std::sqrt(g.domain_measure() * acc);
}

/// table of A(t,k,eta) over the grid (mode order), for hot loops
inline std::vector<double> build_A_table(const MultiplierSpec& spec, double t, const Grid& g) {
    spec.require_time_consistent(t);
    std::vector<double> A(g.size(), 0.0);
    for (int iz = 0; iz < g.n_z; ++iz) {
        int k = g.k_of(iz);
        double z = eval_zeta(spec, t, k);
        for (int jv = 0; jv < g.n_v; ++jv) {
            double eta = g.eta_of(jv);
            A[static_cast<size_t>(iz) * g.n_v + jv] =
                z * eval_M(spec, t, k, eta) * sobolev_bracket(k, eta, spec.s);
        }
    }
    return A;
}

// --- ghost commutator probe (Appendix-B property surface) ----------------------

/// returns ||[m, c] f|| / ((1/K) ||m f||) for the multiplier m and the
/// multiplication operator by the v-profile c
inline double ghost_commutator_check(const MultiplierSpec& spec, Weight which, double t,
                                     const std::vector<double>& coeff, const SpectralField& f) {
    const Grid& g = f.grid;
    auto apply_m = [&](const SpectralField& u) {
        SpectralField out(g, u.reality_flag);
        for (int iz = 0; iz < g.n_z; ++iz) {
            int k = g.k_of(iz);
            for (int jv = 0; jv < g.n_v; ++jv)
                out.at(iz, jv) = u.at(iz, jv) * eval_W(spec, which, t, k, g.eta_of(jv));
        }
        return out;
    };
    SpectralField mf = apply_m(f);
    SpectralField cf = multiply_by_v_profile(f, coeff);
    SpectralField m_cf = apply_m(cf);
    SpectralField c_mf = multiply_by_v_profile(mf, coeff);
    m_cf -= c_mf;
    double denom = l2_norm(mf) / spec.K;
    if (denom == 0.0) return 0.0;
    return l2_norm(m_cf) / denom;
}

// --- audits --------------------------------------------------------------------

struct AuditRow {
    std::string name;
    double worst_margin = 0.0;  // min over samples of (lhs - rhs); >= 0 means pass
    double t = 0, eta = 0;
    int k = 0;
    long violations = 0;
    bool pass() const { return violations == 0; }
};

/// Samples the long-regime multiplier inequalities on a randomized
/// (t, k, eta) grid. All four bounds are the ones the energy estimates
/// consume; see the accompanying tests for the short-regime variants.
inline std::vector<AuditRow> multiplier_audit(double nu, double K, long n_samples = 100000,
                                              std::uint64_t seed = 7) {
    MultiplierSpec spec(nu, K, 1.0 / 64.0, 2.0, Regime::long_time);
    GaussianRng rng(seed);
    const double t_lo = spec.regime_boundary();
    const double t_hi = 0.05 / nu;  // bootstrap horizon c_* nu^{-1} with c_* = 0.05

    std::vector<AuditRow> rows(4);
    rows[0].name = "M_in_[pi^3/8,27pi^3/8]";
    rows[1].name = "-dt_M_lower_bound";
    rows[2].name = "deta_M_upper_bound";
    rows[3].name = "enhanced_dissipation_M_property_ED";
    for (auto& r : rows) r.worst_margin = 1e300;

    auto record = [](AuditRow& row, double margin, double t, int k, double eta) {
        if (margin < row.worst_margin) {
            row.worst_margin = margin;
            row.t = t;
            row.k = k;
            row.eta = eta;
        }
        if (margin < 0) ++row.violations;
    };

    const double pi3 = M_PI * M_PI * M_PI;
    for (long i = 0; i < n_samples; ++i) {
        double t = t_lo * std::pow(t_hi / t_lo, rng.uniform());
        int k;
        double r = rng.uniform();
        if (r < 0.1)
            k = 0;
        else {
            int mag_pool[] = {1, 2, 3, 4, 6, 8, 16, 32, 64, 128};
            k = mag_pool[static_cast<int>(rng.uniform() * 10) % 10];
            if (rng.uniform() < 0.5) k = -k;
        }
        // probe both the critical band eta ~ k t and the far field
        double eta = (rng.uniform() < 0.5)
                         ? k * t + 40.0 * (rng.uniform() - 0.5) * std::max(1.0, std::abs(static_cast<double>(k)))
                         : 400.0 * (rng.uniform() - 0.5);

        double M = eval_M(spec, t, k, eta);
        record(rows[0], std::min(M - pi3 / 8.0, 27.0 * pi3 / 8.0 - M), t, k, eta);

        if (k != 0) {
            double tilt = eta - k * t;
            double denom = k * static_cast<double>(k) + tilt * tilt;
            double lower = (M_PI * M_PI / (4.0 * K)) * k * static_cast<double>(k) / denom;
            record(rows[1], -dt_M(spec, t, k, eta) - lower, t, k, eta);

            double upper = 12.0 * M_PI * M_PI / (K * std::abs(k));
            record(rows[2], upper - std::abs(deta_M(spec, t, k, eta)), t, k, eta);
        }

        double tilt = eta - k * t;
        double lhs = -dt_M(spec, t, k, eta) / M + nu * (k * static_cast<double>(k) + tilt * tilt);
        double rhs = 2.0 / (9.0 * K * M_PI * M_PI) * std::pow(nu, 1.0 / 3.0) *
                     std::pow(std::abs(k), 2.0 / 3.0);
        record(rows[3], lhs - rhs, t, k, eta);
    }
    return rows;
}

/// zeta product rule (two-case form) and zeta commutator bound over
/// |k|,|l| <= kmax and a t grid on the desk-scale horizon; the commutator
/// bound requires k != 0 and k != l (both zeta arguments active), which is
/// the regime the nonlinear estimates use it in.
inline std::vector<AuditRow> zeta_audit(double nu, double delta, int kmax = 64,
                                        int n_t = 100) {
    MultiplierSpec spec(nu, 32.0, delta, 2.0, Regime::long_time);
    const double nu13 = std::pow(nu, 1.0 / 3.0);
    const double t_hi = std::min(0.05 / nu, 5.0 / nu13);
    std::vector<AuditRow> rows(2);
    rows[0].name = "zeta_product_rule";
    rows[1].name = "zeta_commutator_bound";
    for (auto& r : rows) r.worst_margin = 1e300;

    auto record = [](AuditRow& row, double margin, double t, int k, double l) {
        if (margin < row.worst_margin) {
            row.worst_margin = margin;
            row.t = t;
            row.k = k;
            row.eta = l;  // reuse the eta slot for l
        }
        if (margin < 0) ++row.violations;
    };

    for (int it = 0; it < n_t; ++it) {
        double t = t_hi * it / (n_t - 1);
        for (int k = -kmax; k <= kmax; ++k) {
            double zk = eval_zeta(spec, t, k);
            for (int l = -kmax; l <= kmax; ++l) {
                double zl = eval_zeta(spec, t, l);
                double zkl = eval_zeta(spec, t, k - l);
                double rhs = (l != 0 && k != l) ? zl * zkl * std::exp(-delta * nu13 * t)
                                                : zl * zkl;
                record(rows[0], rhs * (1.0 + 1e-12) - zk, t, k, l);
                if (k != 0 && k != l) {
                    double lhs = std::abs(zk - zkl);
                    double bound = zkl * zl * delta * nu13 * std::pow(std::abs(l), 2.0 / 3.0) * t;
                    record(rows[1], bound * (1.0 + 1e-12) - lhs, t, k, l);
                }
            }
        }
    }
    return rows;
}

}  // namespace shearlab
