#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "shearlab/math_util.hpp"
#include "shearlab/shear_profile.hpp"

namespace shearlab {

using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using MatXd = Eigen::MatrixXd;

// The per-mode Laplace-like operators of the moving frame. All act on
// v-profiles for a fixed z-wavenumber k:
//   lap_L      (d_v - ikt)^2 - k^2
//   lap_t      B^2 (d_v - ikt)^2 + B' (d_v - ikt) - k^2      (= Delta_t)
//   lap_tilde  B^2 (d_v - ikt)^2 - k^2                       (= tilde Delta_t)
//   lap_0      B0^2 (d_v - ikt)^2 + B0' (d_v - ikt) - k^2    (= Delta_0)
//   lap_B0     B0^2 d_v^2 - B0' d_v - k^2                    (= Delta_{B0}; no tilt)
enum class EllipticKind { lap_L, lap_t, lap_tilde, lap_0, lap_B0 };

struct EllipticOperatorSpec {
    EllipticKind kind = EllipticKind::lap_L;
    const ShearProfile* profile = nullptr;
    double t = 0.0;
    int k = 1;
};

namespace elliptic_detail {

// periodic Fourier differentiation matrices, cached by (n, L)
inline void diff_matrices(int n, double L, MatXd& D1, MatXd& D2) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::pair<MatXd, MatXd>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, L);
    auto it = cache.find(key);
    if (it == cache.end()) {
        MatXd d1(n, n), d2(n, n);
        std::vector<std::complex<double>> col(n), out(n);
        for (int j = 0; j < n; ++j) {
            std::fill(col.begin(), col.end(), std::complex<double>(0.0, 0.0));
            col[j] = 1.0;
            fft1(col.data(), out.data(), n, FFTW_FORWARD);
            auto spec1 = out, spec2 = out;
            for (int m = 0; m < n; ++m) {
                double xi = prof1d::xi_of(m, n, L);
                spec1[m] *= std::complex<double>(0.0, xi);
                spec2[m] *= -xi * xi;
            }
            spec1[n / 2] = 0.0;  // odd-derivative Nyquist
            fft1(spec1.data(), spec1.data(), n, FFTW_BACKWARD);
            fft1(spec2.data(), spec2.data(), n, FFTW_BACKWARD);
            for (int i = 0; i < n; ++i) {
                d1(i, j) = spec1[i].real() / n;
                d2(i, j) = spec2[i].real() / n;
            }
        }
        it = cache.emplace(key, std::make_pair(std::move(d1), std::move(d2))).first;
    }
    D1 = it->second.first;
    D2 = it->second.second;
}

inline void coefficients(const EllipticOperatorSpec& spec, std::vector<double>& c2,
                         std::vector<double>& c1, bool& tilted) {
    const ShearProfile& p = *spec.profile;
    const int n = p.n();
    c2.assign(n, 1.0);
    c1.assign(n, 0.0);
    tilted = true;
    switch (spec.kind) {
        case EllipticKind::lap_L: break;
        case EllipticKind::lap_t:
            for (int j = 0; j < n; ++j) {
                c2[j] = p.B()[j] * p.B()[j];
                c1[j] = p.Bprime()[j];
            }
            break;
        case EllipticKind::lap_tilde:
            for (int j = 0; j < n; ++j) c2[j] = p.B()[j] * p.B()[j];
            break;
        case EllipticKind::lap_0:
            for (int j = 0; j < n; ++j) {
                c2[j] = p.B0()[j] * p.B0()[j];
                c1[j] = p.B0prime()[j];
            }
            break;
        case EllipticKind::lap_B0:
            for (int j = 0; j < n; ++j) {
                c2[j] = p.B0()[j] * p.B0()[j];
                c1[j] = -p.B0prime()[j];
            }
            tilted = false;
            break;
    }
}

}  // namespace elliptic_detail

/// dense spectral-collocation matrix of the per-mode operator
inline MatXc assemble_elliptic(const EllipticOperatorSpec& spec) {
    if (!spec.profile) throw std::invalid_argument("assemble_elliptic: missing profile");
    const ShearProfile& p = *spec.profile;
    const int n = p.n();
    MatXd D1, D2;
    elliptic_detail::diff_matrices(n, p.L(), D1, D2);
    std::vector<double> c2, c1;
    bool tilted = false;
    elliptic_detail::coefficients(spec, c2, c1, tilted);

    const std::complex<double> ikt =
        tilted ? std::complex<double>(0.0, spec.k * spec.t) : std::complex<double>(0.0, 0.0);
    MatXc A(n, n);
    // (d_v - ikt)^2 = D2 - 2 ikt D1 + (ikt)^2
    A = D2.cast<std::complex<double>>();
    A -= (2.0 * ikt) * D1.cast<std::complex<double>>();
    A.diagonal().array() += ikt * ikt;
    for (int i = 0; i < n; ++i) A.row(i) *= c2[i];
    MatXc T1 = D1.cast<std::complex<double>>();
    T1.diagonal().array() -= ikt;
    for (int i = 0; i < n; ++i) A.row(i) += c1[i] * T1.row(i);
    A.diagonal().array() -= static_cast<double>(spec.k) * spec.k;
    return A;
}

/// matrix-free application through FFTs (identical discretization)
inline VecXc apply_elliptic(const EllipticOperatorSpec& spec, const VecXc& f) {
    const ShearProfile& p = *spec.profile;
    const int n = p.n();
    if (f.size() != n) throw std::invalid_argument("apply_elliptic: size mismatch");
    std::vector<double> c2, c1;
    bool tilted = false;
    elliptic_detail::coefficients(spec, c2, c1, tilted);
    const double kt = tilted ? spec.k * spec.t : 0.0;
    std::vector<std::complex<double>> work(f.data(), f.data() + n), d1(n), d2(n);
    fft1(work.data(), work.data(), n, FFTW_FORWARD);
    for (int m = 0; m < n; ++m) {
        double xi = prof1d::xi_of(m, n, p.L());
        std::complex<double> s(0.0, xi - kt);
        d1[m] = work[m] * s;
        d2[m] = work[m] * s * s;
    }
    d1[n / 2] = 0.0;
    fft1(d1.data(), d1.data(), n, FFTW_BACKWARD);
    fft1(d2.data(), d2.data(), n, FFTW_BACKWARD);
    VecXc out(n);
    for (int i = 0; i < n; ++i)
        out(i) = c2[i] * d2[i] / static_cast<double>(n) + c1[i] * d1[i] / static_cast<double>(n) -
                 static_cast<double>(spec.k) * spec.k * f(i);
    return out;
}

// --- weighted 1-d norms used by the elliptic estimates --------------------------

enum class EllipticM { one, inv_half };  // M = 1 or (k^2 + (xi - kt)^2)^{-1/2}

/// || <k,xi>^s M(t,k,xi) u_hat ||_{l^2} of a v-profile
inline double weighted_mode_norm(const VecXc& u, int k, double t, double s, EllipticM M,
                                 double L) {
    const int n = static_cast<int>(u.size());
    std::vector<std::complex<double>> work(u.data(), u.data() + n);
    fft1(work.data(), work.data(), n, FFTW_FORWARD);
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
        double xi = prof1d::xi_of(m, n, L);
        double w = sobolev_bracket(k, xi, s);
        if (M == EllipticM::inv_half) {
            double tilt = xi - k * t;
            w /= std::sqrt(k * static_cast<double>(k) + tilt * tilt);
        }
        acc += w * w * std::norm(work[m] / static_cast<double>(n));
    }
    return std::sqrt(acc);
}

// --- solvers ----------------------------------------------------------------------

struct DirectSolveResult {
    VecXc solution;
    double residual = 0.0;  // ||A x - rhs|| / ||rhs||
};

inline DirectSolveResult solve_direct(const EllipticOperatorSpec& spec, const VecXc& rhs) {
    if (spec.k == 0)
        throw std::invalid_argument("solve_direct: k = 0 needs the zero-mode gauge path");
    MatXc A = assemble_elliptic(spec);
    Eigen::PartialPivLU<MatXc> lu(A);
    DirectSolveResult out;
    out.solution = lu.solve(rhs);
    double rn = rhs.norm();
    out.residual = rn > 0 ? (A * out.solution - rhs).norm() / rn : 0.0;
    return out;
}

struct NeumannSolveResult {
    VecXc solution;
    double gamma_hat = 0.0;  // measured contraction ratio of the R-series
    int n_terms = 0;
    std::vector<double> term_norms;  // ||<k,dv>^s M R^n rhs||
};

/// Invert Delta_t through Delta_0: Delta_t = (I - R) Delta_0, with
/// (I - R)^{-1} expanded as a Neumann series. Throws if the measured
/// contraction ratio reaches 1 (nu t too large).
inline NeumannSolveResult solve_neumann(const ShearProfile& profile, double t, int k,
                                        const VecXc& rhs, double s = 2.0,
                                        EllipticM M = EllipticM::one, double tol = 1e-12,
                                        int max_terms = 96) {
    if (k == 0) throw std::invalid_argument("solve_neumann: k must be nonzero");
    EllipticOperatorSpec d0{EllipticKind::lap_0, &profile, t, k};
    MatXc A0 = assemble_elliptic(d0);
    Eigen::PartialPivLU<MatXc> lu0(A0);

    const int n = profile.n();
    // R u = [(B0^2 - B^2)(d_v - ikt)^2 + (B0' - B')(d_v - ikt)] Delta_0^{-1} u
    MatXd D1, D2;
    elliptic_detail::diff_matrices(n, profile.L(), D1, D2);
    const std::complex<double> ikt(0.0, k * t);
    MatXc T1 = D1.cast<std::complex<double>>();
    T1.diagonal().array() -= ikt;
    MatXc T2 = D2.cast<std::complex<double>>();
    T2 -= (2.0 * ikt) * D1.cast<std::complex<double>>();
    T2.diagonal().array() += ikt * ikt;

    auto applyR = [&](const VecXc& u) -> VecXc {
        VecXc w = lu0.solve(u);
        VecXc a = T2 * w, b = T1 * w;
        VecXc out(n);
        for (int i = 0; i < n; ++i) {
            double dc2 = profile.B0()[i] * profile.B0()[i] - profile.B()[i] * profile.B()[i];
            double dc1 = profile.B0prime()[i] - profile.Bprime()[i];
            out(i) = dc2 * a(i) + dc1 * b(i);
        }
        return out;
    };

    NeumannSolveResult res;
    VecXc term = rhs;
    VecXc sum = rhs;
    double n0 = weighted_mode_norm(term, k, t, s, M, profile.L());
    res.term_norms.push_back(n0);
    for (int it = 1; it <= max_terms; ++it) {
        term = applyR(term);
        double nn = weighted_mode_norm(term, k, t, s, M, profile.L());
        res.term_norms.push_back(nn);
        double prev = res.term_norms[res.term_norms.size() - 2];
        if (prev > 0) res.gamma_hat = std::max(nn / prev, res.gamma_hat);
        res.n_terms = it;
        if (res.gamma_hat >= 1.0)
            throw std::runtime_error(
                "solve_neumann: contraction ratio >= 1 (nu t too large for the series)");
        sum += term;
        if (nn <= tol * n0) break;
    }
    res.solution = lu0.solve(sum);
    return res;
}

/// zero-mode velocity: -B d_v U = P0 omega with zero-mean gauge
inline VecXc zero_mode_velocity(const ShearProfile& profile, const VecXc& p0_omega) {
    const int n = profile.n();
    std::vector<std::complex<double>> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -p0_omega(i) / profile.B()[i];
    fft1(rhs.data(), rhs.data(), n, FFTW_FORWARD);
    rhs[0] = 0.0;  // compatible data has zero mean; project the defect out
    for (int m = 1; m < n; ++m) {
        double xi = prof1d::xi_of(m, n, profile.L());
        if (m == n / 2 || xi == 0.0) {
            rhs[m] = 0.0;
            continue;
        }
        rhs[m] /= std::complex<double>(0.0, xi);
    }
    fft1(rhs.data(), rhs.data(), n, FFTW_BACKWARD);
    VecXc out(n);
    for (int i = 0; i < n; ++i) out(i) = rhs[i] / static_cast<double>(n);
    return out;
}

// --- Green's function of Delta_{B0,+} at t = 0 -------------------------------------

/// G_k(v,w) = e^{-|k| |y(v) - y(w)|} / |k| (pullback of the flat Helmholtz
/// kernel through b at t = 0), decomposed as chi(w) G_1(v-w) + G_2(v,w).
/// Applying B0^2 d_v^2 + B0' d_v - k^2 to G gives -2 B0(w) delta(v - w);
/// the -2 is the defining constant of this kernel normalization.
struct GreensKernel {
    int k = 1;
    double L_B = 0.0;            // measured support radius of d_v B0
    std::vector<double> chi;     // cutoff on the w grid
    MatXd G;                     // G(v_i, w_j)
    MatXd G2;                    // G - chi(w) G1(v - w)
    double chi_inner = 0.0, chi_outer = 0.0;

    double G1(double r) const { return std::exp(-std::abs(k) * std::abs(r)) / std::abs(k); }
    static double G1_hat_exact(int k, double xi) { return 2.0 / (k * static_cast<double>(k) + xi * xi); }
};

inline GreensKernel greens_kernel(const ShearProfile& profile, int k) {
    if (k == 0) throw std::invalid_argument("greens_kernel: k must be nonzero");
    const int n = profile.n();
    GreensKernel out;
    out.k = k;

    // support radius of d_v B0 (mass-based, in v units)
    auto dB0 = prof1d::derivative(profile.B0(), profile.L());
    double total = 0.0;
    for (double x : dB0) total += std::abs(x);
    double LB = 0.0;
    if (total > 0) {
        std::vector<std::pair<double, double>> by_r(n);
        for (int j = 0; j < n; ++j) by_r[j] = {std::abs(profile.v(j)), std::abs(dB0[j])};
        std::sort(by_r.begin(), by_r.end());
        double acc = 0.0;
        for (const auto& [r, m] : by_r) {
            acc += m;
            if (acc >= (1.0 - 1e-4) * total) {
                LB = r;
                break;
            }
        }
    }
    out.L_B = LB;
    out.chi_inner = 1.0 + LB;
    out.chi_outer = 2.0 + LB;

    out.chi.assign(n, 1.0);
    if (!profile.is_couette()) {
        // Couette has no local region: the kernel is globally translation
        // invariant and chi stays identically 1
        for (int j = 0; j < n; ++j)
            out.chi[j] = smooth_cutoff(profile.v(j), out.chi_inner, out.chi_outer);
    }

    out.G.resize(n, n);
    out.G2.resize(n, n);
    const auto& yv = profile.y_of_v0();
    const double span = 2.0 * profile.L();
    // periodized distance (y extends to y + 2L across the wrap); keeps the
    // sampled kernel consistent with the periodic-box operators up to
    // O(e^{-2|k|L}) images
    auto dist = [&](double a, double b) {
        double d = std::abs(a - b);
        return std::min(d, span - d);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double g = std::exp(-std::abs(k) * dist(yv[i], yv[j])) / std::abs(k);
            out.G(i, j) = g;
            out.G2(i, j) = g - out.chi[j] * out.G1(dist(profile.v(i), profile.v(j)));
        }
    return out;
}

struct GreensFrequencyFit {
    double C1 = 0.0;  // sup |G1_hat| (k^2 + xi^2)
    double C2 = 0.0;  // sup |G2_hat| (k^2 + xi^2) <xi + eta>^{ceil(s) + 2}
};

/// fitted constants of the frequency bounds; s enters through the
/// <xi+eta>^{ceil(s)+2} weight
inline GreensFrequencyFit greens_frequency_fit(const GreensKernel& ker, const ShearProfile& profile,
                                               double s) {
    const int n = profile.n();
    const double L = profile.L();
    const double h = 2.0 * L / n;
    GreensFrequencyFit fit;
    // G1: closed form
    fit.C1 = 2.0;  // |G1_hat|(k^2 + xi^2) = 2 exactly
    // G2: discrete 2-d transform; sample to 2/3 Nyquist to stay clear of ringing
    std::vector<std::complex<double>> work(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) work[static_cast<size_t>(i) * n + j] = ker.G2(i, j);
    fft2(work.data(), work.data(), n, n, FFTW_FORWARD);
    const int mmax = (2 * (n / 2)) / 3;
    const int sexp = static_cast<int>(std::ceil(s)) + 2;
    for (int a = 0; a < n; ++a) {
        int ma = a < n / 2 ? a : a - n;
        if (std::abs(ma) > mmax) continue;
        double xi = (M_PI / L) * ma;
        for (int b = 0; b < n; ++b) {
            int mb = b < n / 2 ? b : b - n;
            if (std::abs(mb) > mmax) continue;
            double eta = (M_PI / L) * mb;
            double mag = std::abs(work[static_cast<size_t>(a) * n + b]) * h * h;
            double weight = (ker.k * ker.k + xi * xi) *
                            std::pow(japanese_bracket(xi + eta), sexp);
            fit.C2 = std::max(fit.C2, mag * weight);
        }
    }
    return fit;
}

// --- elliptic estimate probes -------------------------------------------------------

enum class ProbeTarget { delta0, delta_t, difference };

/// worst ratio of || <k,xi>^s M (Delta_L (c * solve(X)))^ || over
/// || <k,xi>^s M X^ || across a probe set of normalized random band-limited X
inline double elliptic_estimate_probe(const std::vector<double>& coeff,
                                      const ShearProfile& profile, int k, double t,
                                      EllipticM M, ProbeTarget target, double s = 2.0,
                                      int n_probes = 16, std::uint64_t seed = 100) {
    const int n = profile.n();
    const double L = profile.L();
    EllipticOperatorSpec sp0{EllipticKind::lap_0, &profile, t, k};
    EllipticOperatorSpec spt{EllipticKind::lap_t, &profile, t, k};
    Eigen::PartialPivLU<MatXc> lu0(assemble_elliptic(sp0));
    Eigen::PartialPivLU<MatXc> lut(assemble_elliptic(spt));

    GaussianRng rng(seed);
    double worst = 0.0;
    for (int p = 0; p < n_probes; ++p) {
        std::vector<std::complex<double>> Xh(n, 0.0);
        for (int m = 0; m < n; ++m) {
            double xi = prof1d::xi_of(m, n, L);
            if (std::abs(xi) > 0.25 * (M_PI / L) * n) continue;
            Xh[m] = std::complex<double>(rng.normal(), rng.normal()) / japanese_bracket(xi, s);
        }
        fft1(Xh.data(), Xh.data(), n, FFTW_BACKWARD);
        VecXc X(n);
        for (int i = 0; i < n; ++i) X(i) = Xh[i];

        VecXc phi;
        switch (target) {
            case ProbeTarget::delta0: phi = lu0.solve(X); break;
            case ProbeTarget::delta_t: phi = lut.solve(X); break;
            case ProbeTarget::difference: phi = lut.solve(X) - lu0.solve(X); break;
        }
        VecXc cphi(n);
        for (int i = 0; i < n; ++i) cphi(i) = coeff[i] * phi(i);
        EllipticOperatorSpec lap{EllipticKind::lap_L, &profile, t, k};
        VecXc lhs_field = apply_elliptic(lap, cphi);
        double lhs = weighted_mode_norm(lhs_field, k, t, s, M, L);
        double rhs = weighted_mode_norm(X, k, t, s, M, L);
        if (rhs > 0) worst = std::max(worst, lhs / rhs);
    }
    return worst;
}

}  // namespace shearlab
