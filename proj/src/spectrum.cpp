#include "resetfr/spectrum.hpp"

#include <cmath>

#include "resetfr/errors.hpp"

namespace resetfr {

Complex HarmonicSpectrum::at(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? Complex(0.0) : it->second;
}

void HarmonicSpectrum::set(int n, Complex c) {
    if (n < 1) throw InvalidArgument("harmonic index must be positive");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw RangeError("harmonic coefficient " + std::to_string(n) + " is not finite");
    coeffs_[n] = c;
}

void HarmonicSpectrum::add(int n, Complex c) { set(n, at(n) + c); }

HarmonicSpectrum HarmonicSpectrum::scaled(Complex k) const {
    HarmonicSpectrum out(omega_);
    for (const auto& [n, c] : coeffs_) out.coeffs_[n] = k * c;
    return out;
}

HarmonicSpectrum& HarmonicSpectrum::operator+=(const HarmonicSpectrum& other) {
    if (!coeffs_.empty() && !other.coeffs_.empty() && omega_ != other.omega_)
        throw InvalidArgument("cannot add spectra with different base frequencies");
    if (coeffs_.empty()) omega_ = other.omega_;
    for (const auto& [n, c] : other.coeffs_) add(n, c);
    return *this;
}

std::vector<double> reconstruct(const HarmonicSpectrum& spec, std::span<const double> t_grid) {
    std::vector<double> out(t_grid.size(), 0.0);
    const double w = spec.omega();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        // Reduce the phase once per sample so large t does not cost accuracy
        // in the high harmonics.
        const double base = std::fmod(w * t_grid[i], 2.0 * kPi);
        double acc = 0.0;
        for (const auto& [n, c] : spec.coefficients()) {
            const double ph = std::fmod(n * base, 2.0 * kPi);
            acc += c.real() * std::sin(ph) + c.imag() * std::cos(ph);
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace resetfr
