#pragma once

#include <sild/error.hpp>
#include <sild/grid.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace sild {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Magnitudes below this are treated as -600 dB instead of -inf.
inline constexpr double kDbFloorMagnitude = 1e-30;

inline double to_db(double magnitude)
{
    return magnitude < kDbFloorMagnitude ? -600.0 : 20.0 * std::log10(magnitude);
}

inline double from_db(double db) { return std::pow(10.0, db / 20.0); }

enum class Line { P, N };
enum class Side { Left, Right };

/// Which single-ended port (1-based) carries each end of the P and N lines.
///
/// The default follows the usual coupled-line drawing: P runs 1 -> 2 and
/// N runs 3 -> 4, so ports 1/3 form the left differential port and 2/4 the
/// right one. `paired_sides()` is the other common labeling where (1,2) and
/// (3,4) sit on the same side.
struct PortMap {
    int left_p = 1;
    int left_n = 3;
    int right_p = 2;
    int right_n = 4;

    static PortMap through_lines() { return {}; }
    static PortMap paired_sides() { return {1, 2, 3, 4}; }

    int port(Line line, Side side) const
    {
        if (side == Side::Left)
            return line == Line::P ? left_p : left_n;
        return line == Line::P ? right_p : right_n;
    }

    PortMap swapped_pn() const { return {left_n, left_p, right_n, right_p}; }
    PortMap mirrored() const { return {right_p, right_n, left_p, left_n}; }

    void validate() const
    {
        std::array<bool, 4> seen{};
        for (int p : {left_p, left_n, right_p, right_n}) {
            if (p < 1 || p > 4 || seen[static_cast<std::size_t>(p - 1)])
                throw Error(ErrorCode::InvalidArgument, "port map must be a permutation of {1,2,3,4}");
            seen[static_cast<std::size_t>(p - 1)] = true;
        }
    }

    /// Accepts "through" (default labeling), "paired", or an explicit
    /// "lp=1,ln=3,rp=2,rn=4".
    static PortMap parse(std::string_view text)
    {
        if (text == "through" || text == "default")
            return through_lines();
        if (text == "paired")
            return paired_sides();
        PortMap map{0, 0, 0, 0};
        std::string item;
        std::istringstream in{std::string(text)};
        while (std::getline(in, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::InvalidArgument, "port map entry '" + item + "' is not key=value");
            const std::string key = item.substr(0, eq);
            int value = 0;
            try {
                value = std::stoi(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "port map entry '" + item + "' has no port number");
            }
            if (key == "lp")
                map.left_p = value;
            else if (key == "ln")
                map.left_n = value;
            else if (key == "rp")
                map.right_p = value;
            else if (key == "rn")
                map.right_n = value;
            else
                throw Error(ErrorCode::InvalidArgument, "unknown port map key '" + key + "'");
        }
        map.validate();
        return map;
    }

    std::string to_string() const
    {
        return "lp=" + std::to_string(left_p) + ",ln=" + std::to_string(left_n) +
               ",rp=" + std::to_string(right_p) + ",rn=" + std::to_string(right_n);
    }

    friend bool operator==(const PortMap&, const PortMap&) = default;
};

/// Per-frequency N x N single-ended S-matrices sharing one frequency grid.
template <int Ports>
struct BasicNetwork {
    static constexpr int ports = Ports;
    using Matrix = Eigen::Matrix<Complex, Ports, Ports>;

    FrequencyGrid grid;
    std::vector<Matrix> matrices;
    double reference_impedance = 50.0;

    /// S_{to,from} at frequency index k, ports 1-based as in the data sheets.
    Complex s(std::size_t k, int to, int from) const { return matrices[k](to - 1, from - 1); }
    Complex& s(std::size_t k, int to, int from) { return matrices[k](to - 1, from - 1); }

    std::size_t size() const noexcept { return grid.size(); }

    void validate() const
    {
        if (matrices.size() != grid.size())
            throw Error(ErrorCode::GridMismatch, "matrix count " + std::to_string(matrices.size()) +
                                                     " differs from grid length " + std::to_string(grid.size()));
        if (!(reference_impedance > 0.0) || !std::isfinite(reference_impedance))
            throw Error(ErrorCode::InvalidArgument, "reference impedance must be positive");
        for (std::size_t k = 0; k < matrices.size(); ++k)
            if (!matrices[k].allFinite())
                throw Error(ErrorCode::NumericOverflow,
                            "non-finite S-parameter at frequency index " + std::to_string(k));
    }
};

struct SingleEndedNetwork : BasicNetwork<4> {
    PortMap port_map;
};

using TwoPortNetwork = BasicNetwork<2>;

template <int Ports>
bool is_reciprocal(const BasicNetwork<Ports>& net, double tol = 1e-12)
{
    for (const auto& m : net.matrices)
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol)
            return false;
    return true;
}

/// Largest singular value of S over the grid.
template <int Ports>
double max_spectral_norm(const BasicNetwork<Ports>& net)
{
    double worst = 0.0;
    for (const auto& m : net.matrices) {
        Eigen::JacobiSVD<typename BasicNetwork<Ports>::Matrix> svd(m);
        worst = std::max(worst, svd.singularValues()(0));
    }
    return worst;
}

template <int Ports>
bool is_passive(const BasicNetwork<Ports>& net, double tol = 1e-12)
{
    return max_spectral_norm(net) <= 1.0 + tol;
}

/// a*x + b*y entrywise; both networks must share grid and port map.
inline SingleEndedNetwork linear_combination(Complex a, const SingleEndedNetwork& x, Complex b,
                                             const SingleEndedNetwork& y)
{
    if (x.grid != y.grid)
        throw Error(ErrorCode::GridMismatch, "linear_combination: grids differ");
    SingleEndedNetwork out = x;
    for (std::size_t k = 0; k < x.matrices.size(); ++k)
        out.matrices[k] = a * x.matrices[k] + b * y.matrices[k];
    return out;
}

} // namespace sild
