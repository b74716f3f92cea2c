#pragma once

#include <map>
#include <span>
#include <vector>

#include "resetfr/linsys.hpp"

namespace resetfr {

// Harmonic content of a 2*pi/omega periodic signal.
//
// Coefficients are stored against the sine basis: harmonic n with complex
// coefficient c contributes Im(c * exp(j n omega t)) = |c| sin(n omega t + arg c).
// A zero-mean DC term is never stored.
class HarmonicSpectrum {
public:
    HarmonicSpectrum() = default;
    explicit HarmonicSpectrum(double omega) : omega_(omega) {}

    double omega() const { return omega_; }
    const std::map<int, Complex>& coefficients() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    int max_order() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

    // Coefficient of harmonic n, exactly zero when absent.
    Complex at(int n) const;
    void set(int n, Complex c);
    void add(int n, Complex c);

    HarmonicSpectrum scaled(Complex k) const;
    HarmonicSpectrum& operator+=(const HarmonicSpectrum& other);

private:
    double omega_ = 0.0;
    std::map<int, Complex> coeffs_;
};

// Real samples of the spectrum on t_grid (seconds).
std::vector<double> reconstruct(const HarmonicSpectrum& spec, std::span<const double> t_grid);

}  // namespace resetfr
