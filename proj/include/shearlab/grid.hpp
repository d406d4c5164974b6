#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace shearlab {

// Discrete function space on T_z x [-L_v, L_v), both directions periodic.
//   z_i = -pi + 2*pi*i/n_z,        k in {-n_z/2, ..., n_z/2 - 1} (integers)
//   v_j = -L_v + 2*L_v*j/n_v,      eta = (pi/L_v) * m, m in {-n_v/2, ..., n_v/2 - 1}
// Coefficients are stored in FFT index order, row-major with z-major layout:
// coeffs[iz * n_v + jv].
struct Grid {
    int n_z = 0;
    int n_v = 0;
    double L_v = 0.0;
    double dealias_fraction = 2.0 / 3.0;

    Grid() = default;
    Grid(int nz, int nv, double Lv, double frac = 2.0 / 3.0)
        : n_z(nz), n_v(nv), L_v(Lv), dealias_fraction(frac) {
        if (n_z <= 0 || n_z % 2 != 0 || n_v <= 0 || n_v % 2 != 0)
            throw std::invalid_argument("Grid: n_z, n_v must be even positive");
        if (L_v <= 0) throw std::invalid_argument("Grid: L_v must be positive");
        if (dealias_fraction <= 0 || dealias_fraction > 1)
            throw std::invalid_argument("Grid: dealias_fraction in (0,1]");
    }

    size_t size() const { return static_cast<size_t>(n_z) * n_v; }

    double z(int i) const { return -M_PI + 2.0 * M_PI * i / n_z; }
    double v(int j) const { return -L_v + 2.0 * L_v * j / n_v; }

    // integer wavenumber k from the z index
    int k_of(int iz) const { return iz < n_z / 2 ? iz : iz - n_z; }
    // integer index m with eta = (pi/L_v)*m
    int m_of(int jv) const { return jv < n_v / 2 ? jv : jv - n_v; }
    double eta_of(int jv) const { return (M_PI / L_v) * m_of(jv); }
    double eta_spacing() const { return M_PI / L_v; }

    int iz_of_k(int k) const { return k >= 0 ? k : k + n_z; }
    int jv_of_m(int m) const { return m >= 0 ? m : m + n_v; }

    // retained-mode bounds under the dealias rule (Nyquist modes always dropped)
    int k_keep_max() const {
        int km = static_cast<int>(std::floor(dealias_fraction * (n_z / 2)));
        return std::min(km, n_z / 2 - 1);
    }
    int m_keep_max() const {
        int mm = static_cast<int>(std::floor(dealias_fraction * (n_v / 2)));
        return std::min(mm, n_v / 2 - 1);
    }
    bool keeps(int k, int m) const {
        return std::abs(k) <= k_keep_max() && std::abs(m) <= m_keep_max();
    }

    // measure of one physical cell; domain measure = 2*pi * 2*L_v
    double domain_measure() const { return 2.0 * M_PI * 2.0 * L_v; }

    bool operator==(const Grid& o) const {
        return n_z == o.n_z && n_v == o.n_v && L_v == o.L_v &&
               dealias_fraction == o.dealias_fraction;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace shearlab
