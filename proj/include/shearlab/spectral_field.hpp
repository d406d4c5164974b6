#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shearlab/fft.hpp"
#include "shearlab/grid.hpp"
#include "shearlab/math_util.hpp"

namespace shearlab {

using cdouble = std::complex<double>;

/// 2-d field of Fourier coefficients on the moving-frame grid.
/// coeff(0,0) equals the physical mean; coeff(k,m) is the amplitude of
/// e^{i(k z + eta v)} with eta = (pi/L_v) m.
struct SpectralField {
    Grid grid;
    std::vector<cdouble> coeffs;
    bool reality_flag = true;

    SpectralField() = default;
    explicit SpectralField(const Grid& g, bool real = true)
        : grid(g), coeffs(g.size(), cdouble(0.0, 0.0)), reality_flag(real) {}

    cdouble& at(int iz, int jv) { return coeffs[static_cast<size_t>(iz) * grid.n_v + jv]; }
    const cdouble& at(int iz, int jv) const {
        return coeffs[static_cast<size_t>(iz) * grid.n_v + jv];
    }
    cdouble& at_mode(int k, int m) { return at(grid.iz_of_k(k), grid.jv_of_m(m)); }
    const cdouble& at_mode(int k, int m) const { return at(grid.iz_of_k(k), grid.jv_of_m(m)); }

    SpectralField& operator+=(const SpectralField& o) {
        for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        for (size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& c : coeffs) c *= a;
        return *this;
    }

    double max_reality_defect() const {
        double worst = 0.0;
        for (int iz = 0; iz < grid.n_z; ++iz) {
            int k = grid.k_of(iz);
            if (k == -grid.n_z / 2) continue;  // Nyquist has no partner
            for (int jv = 0; jv < grid.n_v; ++jv) {
                int m = grid.m_of(jv);
                if (m == -grid.n_v / 2) continue;
                cdouble d = at_mode(-k, -m) - std::conj(at_mode(k, m));
                worst = std::max(worst, std::abs(d));
            }
        }
        return worst;
    }
};

enum class Op {
    dz,             // i k
    dv,             // i eta
    dv_tilt,        // i (eta - k t)
    lap_L,          // -(k^2 + (eta - k t)^2)
    inv_lap_L,      // reciprocal on nonzero-k modes; k = 0 part returned as zero
    half_lap_L,     // (k^2 + (eta - k t)^2)^{1/2} on nonzero-k modes
    inv_half_lap_L  // (k^2 + (eta - k t)^2)^{-1/2} on nonzero-k modes
};

inline const char* op_name(Op op) {
    switch (op) {
        case Op::dz: return "dz";
        case Op::dv: return "dv";
        case Op::dv_tilt: return "dv_tilt";
        case Op::lap_L: return "lap_L";
        case Op::inv_lap_L: return "inv_lap_L";
        case Op::half_lap_L: return "half_lap_L";
        case Op::inv_half_lap_L: return "inv_half_lap_L";
    }
    return "?";
}

// --- transforms ------------------------------------------------------------

/// physical (z-major, real values) -> spectral coefficients
inline SpectralField transform(const std::vector<double>& physical, const Grid& grid) {
    if (physical.size() != grid.size())
        throw std::invalid_argument("transform: array dimensions do not match grid");
    std::vector<cdouble> work(grid.size());
    for (size_t i = 0; i < physical.size(); ++i) work[i] = physical[i];
    fft2(work.data(), work.data(), grid.n_z, grid.n_v, FFTW_FORWARD);

    SpectralField f(grid, true);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (int iz = 0; iz < grid.n_z; ++iz) {
        // grids start at (-pi, -L_v); the phase (-1)^{k+m} recenters the DFT
        double sz = (grid.k_of(iz) % 2 == 0) ? 1.0 : -1.0;
        for (int jv = 0; jv < grid.n_v; ++jv) {
            double sv = (grid.m_of(jv) % 2 == 0) ? 1.0 : -1.0;
            f.at(iz, jv) = work[static_cast<size_t>(iz) * grid.n_v + jv] * (scale * sz * sv);
        }
    }
    return f;
}

inline std::vector<cdouble> inverse_transform_complex(const SpectralField& f) {
    const Grid& grid = f.grid;
    std::vector<cdouble> work(grid.size());
    for (int iz = 0; iz < grid.n_z; ++iz) {
        double sz = (grid.k_of(iz) % 2 == 0) ? 1.0 : -1.0;
        for (int jv = 0; jv < grid.n_v; ++jv) {
            double sv = (grid.m_of(jv) % 2 == 0) ? 1.0 : -1.0;
            work[static_cast<size_t>(iz) * grid.n_v + jv] = f.at(iz, jv) * (sz * sv);
        }
    }
    fft2(work.data(), work.data(), grid.n_z, grid.n_v, FFTW_BACKWARD);
    return work;
}

inline std::vector<double> inverse_transform(const SpectralField& f) {
    std::vector<cdouble> w = inverse_transform_complex(f);
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = w[i].real();
    return out;
}

// --- mode projections -------------------------------------------------------

/// P_0: keep only the k = 0 modes
inline SpectralField project_zero(const SpectralField& f) {
    SpectralField g(f.grid, f.reality_flag);
    for (int jv = 0; jv < f.grid.n_v; ++jv) g.at(0, jv) = f.at(0, jv);
    return g;
}

/// P_neq = Id - P_0
inline SpectralField project_nonzero(const SpectralField& f) {
    SpectralField g = f;
    for (int jv = 0; jv < f.grid.n_v; ++jv) g.at(0, jv) = 0.0;
    return g;
}

// --- operators ---------------------------------------------------------------

inline cdouble operator_symbol(Op op, int k, double eta, double t, bool strict = false) {
    const double tilt = eta - k * t;
    switch (op) {
        case Op::dz: return cdouble(0.0, k);
        case Op::dv: return cdouble(0.0, eta);
        case Op::dv_tilt: return cdouble(0.0, tilt);
        case Op::lap_L: return cdouble(-(k * static_cast<double>(k) + tilt * tilt), 0.0);
        case Op::inv_lap_L:
        case Op::half_lap_L:
        case Op::inv_half_lap_L: {
            if (k == 0) {
                if (strict) throw std::domain_error("degenerate symbol: inverse op on k = 0 mode");
                return cdouble(0.0, 0.0);
            }
            double s2 = k * static_cast<double>(k) + tilt * tilt;
            if (op == Op::inv_lap_L) return cdouble(-1.0 / s2, 0.0);
            if (op == Op::half_lap_L) return cdouble(std::sqrt(s2), 0.0);
            return cdouble(1.0 / std::sqrt(s2), 0.0);
        }
    }
    return cdouble(0.0, 0.0);
}

/// Frequency-space realization of the moving-frame derivative operators.
/// Inverse/half-power tags act on P_neq only; the k = 0 part is returned as
/// zero unless `strict`, in which case nonzero k = 0 content raises.
inline SpectralField apply_operator(const SpectralField& f, Op op, double t,
                                    bool strict = false) {
    SpectralField g(f.grid, f.reality_flag);
    const bool inverse_tag =
        (op == Op::inv_lap_L || op == Op::half_lap_L || op == Op::inv_half_lap_L);
    for (int iz = 0; iz < f.grid.n_z; ++iz) {
        int k = f.grid.k_of(iz);
        for (int jv = 0; jv < f.grid.n_v; ++jv) {
            const cdouble& c = f.at(iz, jv);
            if (inverse_tag && k == 0) {
                if (strict && std::abs(c) > 1e-14)
                    throw std::domain_error("degenerate symbol: inverse op on k = 0 content");
                g.at(iz, jv) = 0.0;
                continue;
            }
            g.at(iz, jv) = c * operator_symbol(op, k, f.grid.eta_of(jv), t);
        }
    }
    return g;
}

/// Zero every coefficient above dealias_fraction of Nyquist (and the Nyquist
/// lines themselves). Idempotent.
inline SpectralField dealias(const SpectralField& f) {
    SpectralField g = f;
    const int kmax = f.grid.k_keep_max();
    const int mmax = f.grid.m_keep_max();
    for (int iz = 0; iz < f.grid.n_z; ++iz) {
        int k = f.grid.k_of(iz);
        for (int jv = 0; jv < f.grid.n_v; ++jv) {
            int m = f.grid.m_of(jv);
            if (std::abs(k) > kmax || std::abs(m) > mmax) g.at(iz, jv) = 0.0;
        }
    }
    return g;
}

// --- norms -------------------------------------------------------------------

/// L^2 norm over the domain: ||f||^2 = (2 pi)(2 L_v) sum |f_hat|^2
inline double l2_norm(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs) s += std::norm(c);
    return std::sqrt(f.grid.domain_measure() * s);
}

inline double l2_norm_physical(const std::vector<double>& phys, const Grid& g) {
    double s = 0.0;
    for (double x : phys) s += x * x;
    return std::sqrt(g.domain_measure() * s / static_cast<double>(g.size()));
}

/// H^s norm with the bracket <k,eta>^s = (1+k^2)^{s/2} + (1+eta^2)^{s/2}
inline double hs_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    for (int iz = 0; iz < f.grid.n_z; ++iz) {
        int k = f.grid.k_of(iz);
        for (int jv = 0; jv < f.grid.n_v; ++jv) {
            double w = sobolev_bracket(k, f.grid.eta_of(jv), s);
            acc += w * w * std::norm(f.at(iz, jv));
        }
    }
    return std::sqrt(f.grid.domain_measure() * acc);
}

// --- pointwise products (pseudo-spectral) -------------------------------------

/// product of two fields, computed in physical space and dealiased
inline SpectralField multiply(const SpectralField& a, const SpectralField& b) {
    if (a.grid != b.grid) throw std::invalid_argument("multiply: grid mismatch");
    std::vector<cdouble> pa = inverse_transform_complex(a);
    std::vector<cdouble> pb = inverse_transform_complex(b);
    for (size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    fft2(pa.data(), pa.data(), a.grid.n_z, a.grid.n_v, FFTW_FORWARD);
    SpectralField out(a.grid, a.reality_flag && b.reality_flag);
    const double scale = 1.0 / static_cast<double>(a.grid.size());
    for (int iz = 0; iz < a.grid.n_z; ++iz) {
        double sz = (a.grid.k_of(iz) % 2 == 0) ? 1.0 : -1.0;
        for (int jv = 0; jv < a.grid.n_v; ++jv) {
            double sv = (a.grid.m_of(jv) % 2 == 0) ? 1.0 : -1.0;
            out.at(iz, jv) = pa[static_cast<size_t>(iz) * a.grid.n_v + jv] * (scale * sz * sv);
        }
    }
    return dealias(out);
}

/// multiply by a function of v only (given on the v grid), dealiased in v
inline SpectralField multiply_by_v_profile(const SpectralField& a, const std::vector<double>& w) {
    if (w.size() != static_cast<size_t>(a.grid.n_v))
        throw std::invalid_argument("multiply_by_v_profile: size mismatch");
    // per-k 1-d transforms in v; the coefficient depends on v alone so modes in z
    // are untouched
    const Grid& g = a.grid;
    SpectralField out(g, a.reality_flag);
    std::vector<cdouble> line(g.n_v);
    for (int iz = 0; iz < g.n_z; ++iz) {
        for (int jv = 0; jv < g.n_v; ++jv) {
            double sv = (g.m_of(jv) % 2 == 0) ? 1.0 : -1.0;
            line[jv] = a.at(iz, jv) * sv;
        }
        fft1(line.data(), line.data(), g.n_v, FFTW_BACKWARD);
        for (int jv = 0; jv < g.n_v; ++jv) line[jv] *= w[jv];
        fft1(line.data(), line.data(), g.n_v, FFTW_FORWARD);
        const double scale = 1.0 / g.n_v;
        const int mmax = g.m_keep_max();
        for (int jv = 0; jv < g.n_v; ++jv) {
            int m = g.m_of(jv);
            double sv = (m % 2 == 0) ? 1.0 : -1.0;
            out.at(iz, jv) = (std::abs(m) > mmax) ? 0.0 : line[jv] * (scale * sv);
        }
    }
    return out;
}

// --- serialization -----------------------------------------------------------

// 32-byte header: magic[8] | u32 n_z | u32 n_v | f64 L_v | u64 reserved,
// then row-major little-endian complex pairs.
inline constexpr char kFieldMagic[8] = {'S', 'H', 'R', 'F', 'L', 'D', '0', '1'};

inline void write_field_binary(const SpectralField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_binary: cannot open " + path);
    out.write(kFieldMagic, 8);
    std::uint32_t nz = f.grid.n_z, nv = f.grid.n_v;
    std::uint64_t reserved = 0;
    double Lv = f.grid.L_v;
    out.write(reinterpret_cast<const char*>(&nz), 4);
    out.write(reinterpret_cast<const char*>(&nv), 4);
    out.write(reinterpret_cast<const char*>(&Lv), 8);
    out.write(reinterpret_cast<const char*>(&reserved), 8);
    out.write(reinterpret_cast<const char*>(f.coeffs.data()),
              static_cast<std::streamsize>(f.coeffs.size() * sizeof(cdouble)));
}

inline SpectralField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_binary: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kFieldMagic, 8) != 0)
        throw std::runtime_error("read_field_binary: bad magic in " + path);
    std::uint32_t nz = 0, nv = 0;
    std::uint64_t reserved = 0;
    double Lv = 0;
    in.read(reinterpret_cast<char*>(&nz), 4);
    in.read(reinterpret_cast<char*>(&nv), 4);
    in.read(reinterpret_cast<char*>(&Lv), 8);
    in.read(reinterpret_cast<char*>(&reserved), 8);
    SpectralField f(Grid(static_cast<int>(nz), static_cast<int>(nv), Lv));
    in.read(reinterpret_cast<char*>(f.coeffs.data()),
            static_cast<std::streamsize>(f.coeffs.size() * sizeof(cdouble)));
    if (!in) throw std::runtime_error("read_field_binary: truncated file " + path);
    return f;
}

inline void write_field_csv(const SpectralField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    out << "k,m,eta,re,im\n";
    out.precision(17);
    for (int iz = 0; iz < f.grid.n_z; ++iz)
        for (int jv = 0; jv < f.grid.n_v; ++jv)
            out << f.grid.k_of(iz) << ',' << f.grid.m_of(jv) << ',' << f.grid.eta_of(jv) << ','
                << f.at(iz, jv).real() << ',' << f.at(iz, jv).imag() << '\n';
}

}  // namespace shearlab
