#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace hypspec {

/// Element [[a, b], [conj(b), conj(a)]] of SU(1,1) acting on the unit disk.
struct SU11 {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.0, 0.0};

    SU11 operator*(const SU11& o) const;
    SU11 inverse() const;
    std::complex<double> apply(std::complex<double> z) const;
    double trace() const { return 2.0 * a.real(); }
    /// Hyperbolic distance from 0 to g(0).
    double displacement() const;
    /// Translation length 2 acosh(|tr|/2); 0 unless hyperbolic.
    double translation_length() const;
    bool hyperbolic() const { return std::abs(trace()) > 2.0 + 1e-12; }
};

/// Side pairings of the regular octagon with vertices 2^{-1/4} e^{i pi k/4}:
/// generator k (k = 0..3) translates by the systole towards angle pi/8 + k pi/4.
struct BolzaGroup {
    std::vector<SU11> generators;  ///< g_0..g_3 followed by their inverses
    std::vector<std::complex<double>> octagon;  ///< vertices, counterclockwise
    double inradius = 0.0;
    double circumradius = 0.0;
};

BolzaGroup bolza_group();

struct LengthEntry {
    double length = 0.0;
    int multiplicity = 0;  ///< number of oriented primitive classes
};

struct LengthSpectrum {
    std::vector<LengthEntry> entries;
    double l_max = 0.0;
    bool tail_certified = false;

    void validate() const;
    double systole() const;
};

/// Primitive oriented closed geodesics of length <= l_max on the Bolza
/// surface. Group elements are enumerated over a hyperbolic ball around the
/// octagon center, conjugacy classes are merged by conjugating with short
/// elements.
LengthSpectrum bolza_length_spectrum(double l_max);

void write_length_spectrum(std::ostream& os, const LengthSpectrum& ls);
LengthSpectrum read_length_spectrum(std::istream& is);

}  // namespace hypspec
