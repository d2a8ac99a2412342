#include "gpx/fft.hpp"

#include <stdexcept>

namespace gpx {

namespace {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_core(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * two_pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace

void fft(std::vector<cplx>& a) { fft_core(a, -1); }

void ifft(std::vector<cplx>& a) {
    fft_core(a, +1);
    const double inv = 1.0 / static_cast<double>(a.size());
    for (auto& x : a) x *= inv;
}

std::vector<cplx> upsample(const std::vector<cplx>& a, int factor) {
    if (factor <= 1) return a;
    if (!is_pow2(static_cast<std::size_t>(factor)))
        throw std::invalid_argument("upsample: factor must be a power of two");
    const std::size_t n = a.size();
    const std::size_t m = n * static_cast<std::size_t>(factor);
    std::vector<cplx> sp = a;
    fft(sp);
    std::vector<cplx> out(m, cplx(0.0, 0.0));
    // modes k = 0..n/2-1 stay, k = -n/2..-1 move to the tail; Nyquist kept low.
    for (std::size_t k = 0; k < n / 2; ++k) out[k] = sp[k];
    for (std::size_t k = n / 2; k < n; ++k) out[m - n + k] = sp[k];
    ifft(out);
    const double scale = static_cast<double>(factor);
    for (auto& x : out) x *= scale;
    return out;
}

} // namespace gpx
