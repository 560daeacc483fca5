#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "error.hpp"

namespace bcrb {

/**
 * Paraxial ray state: transverse offset from the optical axis and its slope.
 */
template <std::floating_point T>
struct RayVector {
    T position{}; ///< m
    T slope{};    ///< rad

    friend constexpr bool operator==(const RayVector&, const RayVector&) = default;
};

/**
 * 2x2 ray transfer (ABCD) matrix
 *
 *     | a  b |
 *     | c  d |
 *
 * with `b` in metres and `c` in inverse metres. Matrices built from the
 * element set below are unimodular.
 */
template <std::floating_point T>
struct TransferMatrix {
    T a{1};
    T b{0};
    T c{0};
    T d{1};

    static constexpr TransferMatrix identity() noexcept { return {}; }

    constexpr T determinant() const noexcept { return a * d - b * c; }

    constexpr bool is_finite() const noexcept {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }

    /// Matrix product `lhs * rhs`: `rhs` acts on the ray first.
    friend constexpr TransferMatrix operator*(const TransferMatrix& lhs, const TransferMatrix& rhs) noexcept {
        return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
                lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
    }

    friend constexpr bool operator==(const TransferMatrix&, const TransferMatrix&) = default;
};

using Ray = RayVector<double>;
using Matrix2 = TransferMatrix<double>;

namespace element {

/// Curved reflector, signed curvature radius in metres.
template <std::floating_point T>
struct Mirror {
    T curvature_radius;
};

/// Thin lens (or lens-like gain medium), signed focal length in metres.
template <std::floating_point T>
struct ThinLens {
    T focal_length;
};

/// Propagation over a non-negative distance.
template <std::floating_point T>
struct FreeSpace {
    T length;
};

/// Signed translation-form matrix [[1, s], [0, 1]]. Used for the telescope
/// lens terms, whose offsets are +f1 and -f2.
template <std::floating_point T>
struct Displacement {
    T offset;
};

/// Telescope scaling [[M, 0], [0, 1/M]].
template <std::floating_point T>
struct Magnifier {
    T magnification;
};

} // namespace element

template <std::floating_point T>
using OpticalElement = std::variant<element::Mirror<T>, element::ThinLens<T>, element::FreeSpace<T>,
                                    element::Displacement<T>, element::Magnifier<T>>;

namespace detail {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

template <std::floating_point T>
void require_finite(T value, std::string_view what) {
    if (!std::isfinite(value)) {
        throw invalid_element(std::string(what) + " must be finite");
    }
}

} // namespace detail

/// Transfer matrix of a single element; throws invalid_element on a bad parameter.
template <std::floating_point T>
TransferMatrix<T> element_matrix(const OpticalElement<T>& e) {
    using namespace element;
    return std::visit(
        detail::overloaded{
            [](const Mirror<T>& m) -> TransferMatrix<T> {
                detail::require_finite(m.curvature_radius, "mirror curvature radius");
                if (m.curvature_radius == T(0)) {
                    throw invalid_element("mirror curvature radius must be nonzero");
                }
                return {T(1), T(0), T(-1) / m.curvature_radius, T(1)};
            },
            [](const ThinLens<T>& l) -> TransferMatrix<T> {
                detail::require_finite(l.focal_length, "lens focal length");
                if (l.focal_length == T(0)) {
                    throw invalid_element("lens focal length must be nonzero");
                }
                return {T(1), T(0), T(-1) / l.focal_length, T(1)};
            },
            [](const FreeSpace<T>& s) -> TransferMatrix<T> {
                detail::require_finite(s.length, "free-space length");
                if (s.length < T(0)) {
                    throw invalid_element("free-space length must be non-negative");
                }
                return {T(1), s.length, T(0), T(1)};
            },
            [](const Displacement<T>& s) -> TransferMatrix<T> {
                detail::require_finite(s.offset, "displacement offset");
                return {T(1), s.offset, T(0), T(1)};
            },
            [](const Magnifier<T>& m) -> TransferMatrix<T> {
                detail::require_finite(m.magnification, "magnification");
                if (!(m.magnification > T(0))) {
                    throw invalid_element("magnification must be positive");
                }
                return {m.magnification, T(0), T(0), T(1) / m.magnification};
            },
        },
        e);
}

template <std::floating_point T>
constexpr RayVector<T> apply(const TransferMatrix<T>& m, const RayVector<T>& r) noexcept {
    return {m.a * r.position + m.b * r.slope, m.c * r.position + m.d * r.slope};
}

/**
 * Cascade matrices given in propagation order (first-traversed first).
 * The result is M_n ... M_2 M_1, the last-traversed matrix leftmost.
 */
template <std::floating_point T>
TransferMatrix<T> compose(std::span<const TransferMatrix<T>> path) {
    if (path.empty()) {
        throw domain_error("compose: empty element list");
    }
    TransferMatrix<T> acc = path.front();
    for (const auto& m : path.subspan(1)) {
        acc = m * acc;
    }
    return acc;
}

template <std::floating_point T>
TransferMatrix<T> compose(std::initializer_list<TransferMatrix<T>> path) {
    return compose(std::span<const TransferMatrix<T>>(path.begin(), path.size()));
}

/// Outcome of the round-trip stability test, with the reason when it fails.
struct StabilityReport {
    bool stable = false;
    double product = 0.0; ///< a*d of the round-trip matrix
    std::string_view diagnostic;
};

/// Stability requires 0 < a*d < 1 strictly. Only the product matters.
template <std::floating_point T>
StabilityReport stability_check(const TransferMatrix<T>& m) noexcept {
    const double ad = static_cast<double>(m.a) * static_cast<double>(m.d);
    if (std::isnan(ad)) {
        return {false, ad, "round-trip matrix has NaN entries"};
    }
    if (!(ad > 0.0)) {
        return {false, ad, "a*d <= 0"};
    }
    if (!(ad < 1.0)) {
        return {false, ad, "a*d >= 1"};
    }
    return {true, ad, "stable"};
}

template <std::floating_point T>
bool is_stable(const TransferMatrix<T>& m) noexcept {
    return stability_check(m).stable;
}

// ---------------------------------------------------------------------------
// Resonator with a telescope-like internal modulator (TIM)
// ---------------------------------------------------------------------------

/// Which cavity is modelled: with the internal telescope, or the plain
/// mirror / gain module / mirror baseline.
enum class SystemKind { bcrb, original };

inline std::string_view to_string(SystemKind s) noexcept {
    return s == SystemKind::bcrb ? "bcrb" : "original";
}

/**
 * Cavity parameter set, SI units throughout. Defaults are the reference
 * design: 880 mm thermal lens compensated by a -880 mm end mirror, a x3.5
 * telescope 100 mm from the gain module, and a 10 m receiver mirror.
 */
struct CavityGeometry {
    double rho1 = -0.880;       ///< M1 curvature radius, signed (m)
    double rho2 = 10.0;         ///< M2 curvature radius, signed (m)
    double f_R = 0.880;         ///< gain-module thermal-lens focal length (m)
    double f1 = 0.010;          ///< telescope concave-lens focal length magnitude (m)
    double magnification = 3.5; ///< telescope magnification f2/f1
    double L1 = 1e-3;           ///< M1 to gain module (m); "adjacent" elements
    double L2 = 0.100;          ///< gain module to telescope (m)
    double d = 2.6;             ///< transmission distance, telescope to M2 (m)
    double b_gain = 1.5e-3;     ///< gain-module aperture radius (m)
    double b_tim = 10e-3;       ///< telescope aperture radius (m)
    double lambda = 1064e-9;    ///< resonant wavelength (m)

    double f2() const noexcept { return f1 * magnification; }

    friend bool operator==(const CavityGeometry&, const CavityGeometry&) = default;
};

/// Throws validation_error naming the first offending field under `path`.
inline void validate(const CavityGeometry& g, std::string_view path = "geometry") {
    const auto fail = [&](std::string_view field, const std::string& why) {
        throw validation_error(std::string(path) + "." + std::string(field), why);
    };
    const auto finite = [&](std::string_view field, double v) {
        if (!std::isfinite(v)) fail(field, "must be finite");
    };
    const auto positive = [&](std::string_view field, double v) {
        finite(field, v);
        if (!(v > 0.0)) fail(field, "must be positive (got " + std::to_string(v) + ")");
    };
    const auto non_negative = [&](std::string_view field, double v) {
        finite(field, v);
        if (v < 0.0) fail(field, "must be non-negative (got " + std::to_string(v) + ")");
    };
    const auto nonzero = [&](std::string_view field, double v) {
        finite(field, v);
        if (v == 0.0) fail(field, "must be nonzero");
    };
    nonzero("rho1", g.rho1);
    nonzero("rho2", g.rho2);
    nonzero("f_R", g.f_R);
    positive("f1", g.f1);
    positive("M", g.magnification);
    non_negative("L1", g.L1);
    non_negative("L2", g.L2);
    positive("d", g.d);
    positive("b_gain", g.b_gain);
    positive("b_tim", g.b_tim);
    positive("lambda", g.lambda);
}

/**
 * The nine sub-matrices of the telescope cavity in propagation order, starting
 * on M1: M1, L1, gain module, L2, +f1, magnifier, -f2, L3 = d, M2.
 */
inline std::array<Matrix2, 9> bcrb_chain(const CavityGeometry& g) {
    using namespace element;
    return {
        element_matrix<double>(Mirror<double>{g.rho1}),
        element_matrix<double>(FreeSpace<double>{g.L1}),
        element_matrix<double>(ThinLens<double>{g.f_R}),
        element_matrix<double>(FreeSpace<double>{g.L2}),
        element_matrix<double>(Displacement<double>{g.f1}),
        element_matrix<double>(Magnifier<double>{g.magnification}),
        element_matrix<double>(Displacement<double>{-g.f2()}),
        element_matrix<double>(FreeSpace<double>{g.d}),
        element_matrix<double>(Mirror<double>{g.rho2}),
    };
}

/// Canonical round-trip matrix of the telescope cavity (product of bcrb_chain).
inline Matrix2 round_trip_bcrb(const CavityGeometry& g) {
    const auto chain = bcrb_chain(g);
    return compose(std::span<const Matrix2>(chain));
}

/**
 * Closed-form elements of the telescope cavity round trip, written with
 * L2' = L2 + f1 and L3' = d - f2. Cross-check for round_trip_bcrb.
 * Throws singular_configuration when b vanishes (c = (ad - 1)/b).
 */
inline Matrix2 round_trip_closed_form(const CavityGeometry& g) {
    const double M = g.magnification;
    if (!(M > 0.0) || g.f_R == 0.0 || g.rho1 == 0.0 || g.rho2 == 0.0) {
        throw domain_error("round_trip_closed_form: M, f_R, rho1 and rho2 must be nonzero");
    }
    const double L2p = g.L2 + g.f1;
    const double L3p = g.d - g.f2();
    const double lens_term = M - (L3p / M + L2p * M) / g.f_R;
    const double b = g.L1 * lens_term + L2p * M + L3p / M;
    const double a = lens_term - b / g.rho1;
    const double d = 1.0 / M - g.L1 / (g.f_R * M) - b / g.rho2;
    if (std::abs(b) < 1e-12) {
        throw singular_configuration("round_trip_closed_form: b vanishes, c = (ad - 1)/b is undefined");
    }
    return {a, b, (a * d - 1.0) / b, d};
}

/// Round trip of the baseline cavity: M1, L1, gain module, L2 + d, M2.
inline Matrix2 round_trip_original(const CavityGeometry& g) {
    using namespace element;
    return compose<double>({
        element_matrix<double>(Mirror<double>{g.rho1}),
        element_matrix<double>(FreeSpace<double>{g.L1}),
        element_matrix<double>(ThinLens<double>{g.f_R}),
        element_matrix<double>(FreeSpace<double>{g.L2 + g.d}),
        element_matrix<double>(Mirror<double>{g.rho2}),
    });
}

inline Matrix2 round_trip(const CavityGeometry& g, SystemKind system) {
    return system == SystemKind::bcrb ? round_trip_bcrb(g) : round_trip_original(g);
}

} // namespace bcrb
