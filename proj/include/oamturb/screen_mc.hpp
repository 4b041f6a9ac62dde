#pragma once

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oamturb/errors.hpp"
#include "oamturb/gauss_legendre.hpp"
#include "oamturb/lgmode.hpp"
#include "oamturb/parallel.hpp"
#include "oamturb/turbulence.hpp"

namespace oamturb {

/// Square sampling grid of a phase screen, centred on the optical axis. Pixel (i, j)
/// sits at x = (i - n/2) * pixel, y = (j - n/2) * pixel.
struct ScreenGrid {
    int n = 256;
    double extent = 1.0;

    double pixel() const { return extent / n; }

    void validate() const {
        if (n < 256 || !std::has_single_bit(static_cast<unsigned>(n))) {
            throw ConfigError("screen grid size must be a power of two >= 256");
        }
        if (!(extent > 0.0) || !std::isfinite(extent)) {
            throw ConfigError("screen extent must be positive");
        }
    }

    /// Radius containing the beam's intensity for guard purposes: w0 sqrt(|l0|/2 + 4).
    static double beam_radius(int l0, double w0) { return w0 * std::sqrt(std::abs(l0) / 2.0 + 4.0); }

    /// Smallest extent accepted for a beam. The r0 term is capped at two beam radii;
    /// beyond that the screen is smooth over the beam and the subharmonics carry the
    /// large scales.
    static double min_extent(int l0, double w0, double r0) {
        const double beam = beam_radius(l0, w0);
        return 8.0 * std::max(beam, std::min(r0, 2.0 * beam));
    }

    /// Smallest grid satisfying the extent and resolution guards.
    static ScreenGrid for_beam(int l0, double w0, double r0) {
        ScreenGrid grid;
        grid.extent = min_extent(l0, w0, r0);
        const double max_pixel = std::min(w0, r0) / 16.0;
        const auto needed = static_cast<unsigned>(std::floor(grid.extent / max_pixel)) + 1u;
        grid.n = static_cast<int>(std::bit_ceil(std::max(256u, needed)));
        return grid;
    }
};

/// Throws ConfigError unless the pixel is finer than r0 / 16.
inline void check_screen_resolution(const ScreenGrid& grid, double r0) {
    grid.validate();
    if (!(grid.pixel() < r0 / 16.0)) {
        throw ConfigError("screen pixel " + std::to_string(grid.pixel()) + " is not below r0/16 = " +
                          std::to_string(r0 / 16.0));
    }
}

/// Throws ConfigError unless the grid resolves and contains the beam.
inline void check_beam_grid(const ScreenGrid& grid, int l0, double w0, double r0) {
    check_screen_resolution(grid, r0);
    if (!(grid.pixel() < w0 / 16.0)) {
        throw ConfigError("screen pixel is not below w0/16");
    }
    const double needed = ScreenGrid::min_extent(l0, w0, r0);
    if (grid.extent < needed) {
        throw ConfigError("screen extent " + std::to_string(grid.extent) + " is below the required " +
                          std::to_string(needed));
    }
}

/// One realization of a thin random phase screen (radians), row-major n x n.
struct PhaseScreen {
    ScreenGrid grid;
    std::vector<double> values;
    std::uint64_t seed = 0;
    int part = 0;  ///< 0 = real, 1 = imaginary part of the generating complex field

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.n + i]; }

    /// Bilinear interpolation at physical coordinates (x, y).
    double sample(double x, double y) const {
        const double fx = x / grid.pixel() + grid.n / 2;
        const double fy = y / grid.pixel() + grid.n / 2;
        const int i = static_cast<int>(std::floor(fx));
        const int j = static_cast<int>(std::floor(fy));
        if (i < 0 || j < 0 || i + 1 >= grid.n || j + 1 >= grid.n) {
            throw DomainError("screen sample outside the grid");
        }
        const double tx = fx - i;
        const double ty = fy - j;
        return (1.0 - ty) * ((1.0 - tx) * at(i, j) + tx * at(i + 1, j)) +
               ty * ((1.0 - tx) * at(i, j + 1) + tx * at(i + 1, j + 1));
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_words(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(b));
    h = splitmix64(h ^ static_cast<std::uint64_t>(c));
    return h;
}

// Standard complex Gaussian (unit-variance real and imaginary parts) keyed by a
// frequency label, so a given spatial frequency draws the same value on every grid.
inline std::complex<double> keyed_gaussian(std::uint64_t seed, std::int64_t a, std::int64_t b, std::int64_t c) {
    const std::uint64_t h1 = hash_words(seed, a, b, c);
    const std::uint64_t h2 = splitmix64(h1);
    const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline std::mutex& fftw_planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t size)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size))) {
        if (data == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* data;
};

// Unnormalized inverse 2-D DFT in place. Planning is serialized; execution is not.
inline void inverse_fft_2d(FftwBuffer& buffer, int n) {
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_2d(n, n, buffer.data, buffer.data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

// Ten levels of 3x3 subharmonics reach frequencies 3^-10 below the grid spacing; the
// Kolmogorov structure function picks up low-frequency power only as f^(1/3), so fewer
// levels leave a visible deficit at a quarter of the screen.
inline constexpr int kSubharmonicLevels = 10;
inline constexpr std::int64_t kSubharmonicTag = 0x5ab0000000;

// Variance weights for a frequency cell represented by its centre point: the cell
// integral of |f|^2 Phi(f) divided by its centre value times the cell area, for an
// edge cell (centre (1, 0)) and a corner cell (centre (1, 1)) in units of the cell
// size. Matching this moment makes the small-separation structure function exact.
inline constexpr double kEdgeCellWeight = 1.1156765726208762;
inline constexpr double kCornerCellWeight = 1.0712459515986266;

inline double cell_weight(int a, int b) { return (a != 0 && b != 0) ? kCornerCellWeight : kEdgeCellWeight; }

inline void remove_piston(std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    for (double& v : values) {
        v -= mean;
    }
}

/// Spectral amplitudes for one (grid, model): everything about a screen except the
/// random numbers.
struct ScreenSpectrum {
    ScreenGrid grid;
    std::vector<double> amplitude;  ///< FFT cell amplitudes, row-major, with the centring sign
    std::vector<double> sub_amplitude;  ///< [level-1][b+1][a+1], zero at a = b = 0
    std::vector<std::vector<std::complex<double>>> waves;  ///< exp(2 pi i dfp x_i) per level
};

inline ScreenSpectrum screen_spectrum(const ScreenGrid& grid, const TurbulenceModel& model) {
    const int n = grid.n;
    const double df = 1.0 / grid.extent;  // cycles per metre
    ScreenSpectrum spec;
    spec.grid = grid;
    spec.amplitude.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        const int ky = j < n / 2 ? j : j - n;
        for (int i = 0; i < n; ++i) {
            const int kx = i < n / 2 ? i : i - n;
            if (kx == 0 && ky == 0) {
                continue;
            }
            const double freq = df * std::hypot(static_cast<double>(kx), static_cast<double>(ky));
            // (-1)^(kx+ky) moves the origin to the grid centre.
            const double parity = ((kx + ky) & 1) ? -1.0 : 1.0;
            double variance = phase_spectrum(freq, model) * df * df;
            if (std::abs(kx) <= 1 && std::abs(ky) <= 1) {
                variance *= cell_weight(kx, ky);
            }
            spec.amplitude[static_cast<std::size_t>(j) * n + i] = parity * std::sqrt(variance);
        }
    }
    spec.sub_amplitude.assign(static_cast<std::size_t>(kSubharmonicLevels) * 9, 0.0);
    spec.waves.resize(kSubharmonicLevels);
    for (int level = 1; level <= kSubharmonicLevels; ++level) {
        const double dfp = df / std::pow(3.0, level);
        for (int b = -1; b <= 1; ++b) {
            for (int a = -1; a <= 1; ++a) {
                if (a == 0 && b == 0) {
                    continue;
                }
                const double freq = dfp * std::hypot(static_cast<double>(a), static_cast<double>(b));
                spec.sub_amplitude[(level - 1) * 9 + (b + 1) * 3 + (a + 1)] =
                    std::sqrt(phase_spectrum(freq, model) * dfp * dfp * cell_weight(a, b));
            }
        }
        auto& wave = spec.waves[level - 1];
        wave.resize(n);
        for (int i = 0; i < n; ++i) {
            const double x = (i - n / 2) * grid.pixel();
            wave[i] = std::polar(1.0, 2.0 * std::numbers::pi * dfp * x);
        }
    }
    return spec;
}

inline std::pair<PhaseScreen, PhaseScreen> sample_screen_pair(const ScreenSpectrum& spec, std::uint64_t seed) {
    const int n = spec.grid.n;
    const std::size_t total = static_cast<std::size_t>(n) * n;

    FftwBuffer field(total);
    for (int j = 0; j < n; ++j) {
        const int ky = j < n / 2 ? j : j - n;
        for (int i = 0; i < n; ++i) {
            const int kx = i < n / 2 ? i : i - n;
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            const double amplitude = spec.amplitude[k];
            if (amplitude == 0.0) {
                field.data[k][0] = 0.0;
                field.data[k][1] = 0.0;
                continue;
            }
            const auto c = keyed_gaussian(seed, kx, ky, 0);
            field.data[k][0] = amplitude * c.real();
            field.data[k][1] = amplitude * c.imag();
        }
    }
    inverse_fft_2d(field, n);

    // Subharmonics: sum over (level, a, b) of c * e_a(x) * e_b(y). Terms with a = 0 are
    // constant along a row; the rest are grouped per (level, a) into row coefficients.
    std::vector<std::complex<double>> row_const(n, 0.0);
    std::vector<std::vector<std::complex<double>>> row_coeff;
    std::vector<const std::vector<std::complex<double>>*> row_wave;
    std::vector<bool> row_conj;
    for (int level = 1; level <= kSubharmonicLevels; ++level) {
        const auto& wave = spec.waves[level - 1];
        for (int a = -1; a <= 1; ++a) {
            std::vector<std::complex<double>> coeff(n, 0.0);
            for (int b = -1; b <= 1; ++b) {
                const double amplitude = spec.sub_amplitude[(level - 1) * 9 + (b + 1) * 3 + (a + 1)];
                if (amplitude == 0.0) {
                    continue;
                }
                const auto c = amplitude * keyed_gaussian(seed, kSubharmonicTag + level, a, b);
                for (int j = 0; j < n; ++j) {
                    const auto ey = b == 0 ? std::complex<double>(1.0) : (b > 0 ? wave[j] : std::conj(wave[j]));
                    coeff[j] += c * ey;
                }
            }
            if (a == 0) {
                for (int j = 0; j < n; ++j) {
                    row_const[j] += coeff[j];
                }
            } else {
                row_coeff.push_back(std::move(coeff));
                row_wave.push_back(&wave);
                row_conj.push_back(a < 0);
            }
        }
    }
    std::vector<double> row_re(n);
    std::vector<double> row_im(n);
    for (int j = 0; j < n; ++j) {
        std::fill(row_re.begin(), row_re.end(), row_const[j].real());
        std::fill(row_im.begin(), row_im.end(), row_const[j].imag());
        for (std::size_t q = 0; q < row_coeff.size(); ++q) {
            const double ur = row_coeff[q][j].real();
            const double ui = row_coeff[q][j].imag();
            const double sign = row_conj[q] ? -1.0 : 1.0;
            const auto* wave = row_wave[q]->data();
            for (int i = 0; i < n; ++i) {
                const double wr = wave[i].real();
                const double wi = sign * wave[i].imag();
                row_re[i] += ur * wr - ui * wi;
                row_im[i] += ur * wi + ui * wr;
            }
        }
        for (int i = 0; i < n; ++i) {
            auto& cell = field.data[static_cast<std::size_t>(j) * n + i];
            cell[0] += row_re[i];
            cell[1] += row_im[i];
        }
    }

    PhaseScreen re{spec.grid, std::vector<double>(total), seed, 0};
    PhaseScreen im{spec.grid, std::vector<double>(total), seed, 1};
    for (std::size_t k = 0; k < total; ++k) {
        re.values[k] = field.data[k][0];
        im.values[k] = field.data[k][1];
    }
    remove_piston(re.values);
    remove_piston(im.values);
    return {std::move(re), std::move(im)};
}

}  // namespace detail

/// Two independent screens from one complex Gaussian random field with the Kolmogorov
/// phase spectrum: an FFT over the grid frequencies plus ten levels of 3x3
/// subharmonics for the scales the grid cannot hold. Piston is removed from each.
inline std::pair<PhaseScreen, PhaseScreen> sample_screen_pair(const ScreenGrid& grid, const TurbulenceModel& model,
                                                              std::uint64_t seed) {
    check_screen_resolution(grid, model.r0());
    return detail::sample_screen_pair(detail::screen_spectrum(grid, model), seed);
}

/// Deterministic screen for (grid, model, seed): the real part of the seed's field.
inline PhaseScreen sample_screen(const ScreenGrid& grid, const TurbulenceModel& model, std::uint64_t seed) {
    return sample_screen_pair(grid, model, seed).first;
}

/// Empirical structure function <(phi(x + d) - phi(x))^2> at the given pixel lags,
/// averaged over both axes and all screens.
inline std::vector<double> empirical_structure_function(std::span<const PhaseScreen> screens,
                                                        std::span<const int> lags) {
    std::vector<double> out;
    out.reserve(lags.size());
    for (int lag : lags) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& screen : screens) {
            const int n = screen.grid.n;
            if (lag <= 0 || lag >= n) {
                throw DomainError("structure-function lag out of range");
            }
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i + lag < n; ++i) {
                    const double dx = screen.at(i + lag, j) - screen.at(i, j);
                    const double dy = screen.at(j, i + lag) - screen.at(j, i);
                    sum += dx * dx + dy * dy;
                    count += 2;
                }
            }
        }
        out.push_back(sum / static_cast<double>(count));
    }
    return out;
}

/// Flat binary screen file, little-endian:
///   bytes 0-7   magic "OAMSCRN1"
///   bytes 8-15  uint64 n
///   bytes 16-23 float64 extent (m)
///   bytes 24-31 uint64 seed
///   then n*n float64 phases (rad), row-major, row j = y index.
inline constexpr char kScreenMagic[8] = {'O', 'A', 'M', 'S', 'C', 'R', 'N', '1'};

inline void write_screen_binary(const PhaseScreen& screen, std::ostream& out) {
    static_assert(std::endian::native == std::endian::little, "screen files are little-endian");
    const std::uint64_t n = static_cast<std::uint64_t>(screen.grid.n);
    out.write(kScreenMagic, sizeof kScreenMagic);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&screen.grid.extent), sizeof(double));
    out.write(reinterpret_cast<const char*>(&screen.seed), sizeof screen.seed);
    out.write(reinterpret_cast<const char*>(screen.values.data()),
              static_cast<std::streamsize>(screen.values.size() * sizeof(double)));
}

inline PhaseScreen read_screen_binary(std::istream& in) {
    char magic[8];
    std::uint64_t n = 0;
    PhaseScreen screen;
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kScreenMagic, sizeof magic) != 0) {
        throw ConfigError("not a phase screen file");
    }
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&screen.grid.extent), sizeof(double));
    in.read(reinterpret_cast<char*>(&screen.seed), sizeof screen.seed);
    if (!in || n == 0 || n > (1u << 16)) {
        throw ConfigError("corrupt phase screen header");
    }
    screen.grid.n = static_cast<int>(n);
    screen.values.resize(n * n);
    in.read(reinterpret_cast<char*>(screen.values.data()), static_cast<std::streamsize>(n * n * sizeof(double)));
    if (!in) {
        throw ConfigError("truncated phase screen file");
    }
    return screen;
}

/// Options for the Monte-Carlo channel estimator.
struct McOptions {
    std::optional<ScreenGrid> grid;  ///< defaults to ScreenGrid::for_beam
    int workers = 1;
    int radial_nodes = 48;
    double max_rel_sigma = 0.02;  ///< standard-error budget for the warning flag
};

struct McAmplitudes {
    double a = 0.0;
    double sigma_a = 0.0;
    double b = 0.0;
    double sigma_b = 0.0;
    int samples = 0;
    ScreenGrid grid;
    bool budget_exceeded = false;
};

namespace detail {

struct RingPoint {
    std::size_t index;  ///< lower-left pixel of the bilinear stencil
    double tx;
    double ty;
    std::complex<double> twist;  ///< exp(i 2 |l0| theta)
};

struct RingQuadrature {
    std::vector<double> radii;
    std::vector<double> weights;  ///< GL weight * R(r)^2 * r
    std::vector<std::vector<RingPoint>> points;
};

inline RingQuadrature ring_quadrature(int l0, double w0, const ScreenGrid& grid, int nodes) {
    const LGMode mode(l0, w0);
    const double ring = std::sqrt(mode.abs_l() / 2.0);
    const double lo = std::max(0.0, ring - 5.0) * w0;
    const double hi = (ring + 5.0) * w0;
    if (hi > grid.extent / 2.0 - 2.0 * grid.pixel()) {
        throw ConfigError("beam does not fit inside the screen");
    }
    const int shift = 2 * mode.abs_l();
    const auto& rule = gauss_legendre(nodes);
    RingQuadrature out;
    for (int k = 0; k < nodes; ++k) {
        const double r = 0.5 * (hi + lo) + 0.5 * (hi - lo) * rule.nodes[k];
        const double profile = radial_profile(mode, r);
        out.radii.push_back(r);
        out.weights.push_back(rule.weights[k] * 0.5 * (hi - lo) * profile * profile * r);
        const double per_circumference = 4.0 * std::numbers::pi * r / grid.pixel();
        const auto count = static_cast<int>(std::bit_ceil(
            static_cast<unsigned>(std::max({64.0, 16.0 * mode.abs_l(), std::ceil(per_circumference)}))));
        std::vector<RingPoint> pts(count);
        for (int j = 0; j < count; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / count;
            const double fx = r * std::cos(theta) / grid.pixel() + grid.n / 2;
            const double fy = r * std::sin(theta) / grid.pixel() + grid.n / 2;
            const int i0 = static_cast<int>(std::floor(fx));
            const int j0 = static_cast<int>(std::floor(fy));
            pts[j].index = static_cast<std::size_t>(j0) * grid.n + i0;
            pts[j].tx = fx - i0;
            pts[j].ty = fy - j0;
            pts[j].twist = std::polar(1.0, shift * theta);
        }
        out.points.push_back(std::move(pts));
    }
    return out;
}

// Per-screen estimates: a = sum_r w |c_0(r)|^2 and b = sum_r w (|c_2l0|^2 + |c_-2l0|^2) / 2,
// where c_k(r) is the k-th azimuthal Fourier coefficient of exp(i phi) on the ring r.
inline std::pair<double, double> ring_estimate(const PhaseScreen& screen, const RingQuadrature& rings) {
    const std::size_t n = static_cast<std::size_t>(screen.grid.n);
    const double* v = screen.values.data();
    double a = 0.0;
    double b = 0.0;
    for (std::size_t k = 0; k < rings.radii.size(); ++k) {
        const auto& pts = rings.points[k];
        std::complex<double> c0 = 0.0;
        std::complex<double> cplus = 0.0;
        std::complex<double> cminus = 0.0;
        for (const auto& p : pts) {
            const double* q = v + p.index;
            const double phase = (1.0 - p.ty) * ((1.0 - p.tx) * q[0] + p.tx * q[1]) +
                                 p.ty * ((1.0 - p.tx) * q[n] + p.tx * q[n + 1]);
            const std::complex<double> field(std::cos(phase), std::sin(phase));
            c0 += field;
            cplus += field * std::conj(p.twist);
            cminus += field * p.twist;
        }
        const double count = static_cast<double>(pts.size());
        a += rings.weights[k] * std::norm(c0) / (count * count);
        b += rings.weights[k] * 0.5 * (std::norm(cplus) + std::norm(cminus)) / (count * count);
    }
    return {a, b};
}

inline std::uint64_t pair_seed(std::uint64_t seed, std::size_t pair) {
    return hash_words(seed, static_cast<std::int64_t>(pair), 0x6d63, 0);
}

}  // namespace detail

/// Monte-Carlo estimate of the survival and crosstalk amplitudes: each sample screen is
/// applied to the LG mode, the azimuthal Fourier content of exp(i phi) is extracted on
/// radial rings, and the ring powers are summed with the mode's intensity weights.
/// Samples 2k and 2k+1 share one complex field; per-pair seeds come from (seed, k).
inline McAmplitudes mc_amplitudes(int l0, double w0, const TurbulenceModel& model, int n_samples,
                                  std::uint64_t seed, const McOptions& options = {}) {
    if (l0 == 0) {
        throw DomainError("the OAM qubit needs l0 != 0");
    }
    if (n_samples < 100) {
        throw ConfigError("mc_amplitudes needs at least 100 samples");
    }
    const ScreenGrid grid = options.grid.value_or(ScreenGrid::for_beam(l0, w0, model.r0()));
    check_beam_grid(grid, l0, w0, model.r0());
    const auto rings = detail::ring_quadrature(l0, w0, grid, options.radial_nodes);

    const std::size_t pairs = (static_cast<std::size_t>(n_samples) + 1) / 2;
    std::vector<double> a_samples(static_cast<std::size_t>(n_samples));
    std::vector<double> b_samples(static_cast<std::size_t>(n_samples));
    const auto spectrum = detail::screen_spectrum(grid, model);
    parallel_for(pairs, options.workers, [&](std::size_t p) {
        auto [first, second] = detail::sample_screen_pair(spectrum, detail::pair_seed(seed, p));
        std::tie(a_samples[2 * p], b_samples[2 * p]) = detail::ring_estimate(first, rings);
        if (2 * p + 1 < a_samples.size()) {
            std::tie(a_samples[2 * p + 1], b_samples[2 * p + 1]) = detail::ring_estimate(second, rings);
        }
    });

    auto mean_and_error = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) {
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) {
            var += (x - mean) * (x - mean);
        }
        var /= static_cast<double>(xs.size() - 1);
        return std::pair{mean, std::sqrt(var / static_cast<double>(xs.size()))};
    };

    McAmplitudes out;
    out.samples = n_samples;
    out.grid = grid;
    std::tie(out.a, out.sigma_a) = mean_and_error(a_samples);
    std::tie(out.b, out.sigma_b) = mean_and_error(b_samples);
    out.budget_exceeded =
        out.sigma_a > options.max_rel_sigma * out.a || out.sigma_b > options.max_rel_sigma * std::abs(out.b);
    return out;
}

}  // namespace oamturb
