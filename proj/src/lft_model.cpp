#include "navsim/lft_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "navsim/errors.hpp"

namespace navsim {

ParamPoint param_point(const StateVector& s, MassRatio mu) {
    const auto r = primary_distances(s, mu);
    return {r.r1, r.r2};
}

void ParamBox::validate() const {
    auto check = [](double lo, double hi, const char* name) {
        if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
            std::ostringstream os;
            os << name << " bounds must satisfy 0 < min < max, got [" << lo << ", " << hi << "]";
            throw ValidationError("param_box", os.str());
        }
    };
    check(r1_min, r1_max, "r1");
    check(r2_min, r2_max, "r2");
}

bool ParamBox::contains(const ParamPoint& p) const noexcept {
    return p.r1 >= r1_min && p.r1 <= r1_max && p.r2 >= r2_min && p.r2 <= r2_max;
}

bool ParamBox::covers(const ParamBox& o) const noexcept {
    return r1_min <= o.r1_min && r1_max >= o.r1_max && r2_min <= o.r2_min && r2_max >= o.r2_max;
}

ParamPoint ParamBox::clamp(const ParamPoint& p) const noexcept {
    return {std::clamp(p.r1, r1_min, r1_max), std::clamp(p.r2, r2_min, r2_max)};
}

UncertainParam normalize_param(double r, double min, double max) {
    if (!(min < max)) {
        throw ValidationError("param_box", "normalize_param requires min < max");
    }
    UncertainParam p;
    p.nominal = 0.5 * (min + max);
    p.spread = (max - min) / (max + min);
    p.delta = (r - p.nominal) / (p.nominal * p.spread);
    return p;
}

double denormalize(const UncertainParam& p) {
    return p.nominal * (1.0 + p.delta * p.spread);
}

double range_weight(double r, double r_min, double r_max, double eta_min, double eta_max) {
    const double rc = std::clamp(r, r_min, r_max);
    return eta_min + (rc - r_min) / (r_max - r_min) * (eta_max - eta_min);
}

Mat6 plant_A(const ParamPoint& rho, MassRatio mu) {
    // Extended precision so the large entries near the Moon are correctly
    // rounded; they cancel against b(rho) in A s + b.
    const long double m = mu.value();
    const long double r1 = rho.r1, r2 = rho.r2;
    const long double a63l = (m - 1) / (r1 * r1 * r1) - m / (r2 * r2 * r2);
    const double a63 = static_cast<double>(a63l);
    const double a41 = static_cast<double>(a63l + 1);

    Mat6 A = Mat6::Zero();
    A.topRightCorner<3, 3>().setIdentity();
    A(3, 0) = a41;
    A(4, 1) = a41;
    A(5, 2) = a63;
    A(3, 4) = 2.0;
    A(4, 3) = -2.0;
    return A;
}

Vec6 plant_b(const ParamPoint& rho, MassRatio mu) {
    const long double m = mu.value();
    const long double r1 = rho.r1, r2 = rho.r2;
    Vec6 b = Vec6::Zero();
    b[3] = static_cast<double>(m * (1 - m) * (1 / (r2 * r2 * r2) - 1 / (r1 * r1 * r1)));
    return b;
}

Mat6 measurement_C(const ParamPoint& rho) {
    Mat6 C = Mat6::Zero();
    C.block<3, 3>(0, 0) = Mat3::Identity() * (-1.0 / rho.r1);
    C.block<3, 3>(3, 0) = Mat3::Identity() * (-1.0 / rho.r2);
    return C;
}

Vec6 measurement_d(const ParamPoint& rho, MassRatio mu) {
    const double m = mu.value();
    Vec6 d = Vec6::Zero();
    d[0] = -m / rho.r1;
    d[3] = (1.0 - m) / rho.r2;
    return d;
}

Mat69 noise_D(const ParamPoint& rho, double eta_min, double eta_max, const ParamBox& box) {
    const double w1 = range_weight(rho.r1, box.r1_min, box.r1_max, eta_min, eta_max);
    const double w2 = range_weight(rho.r2, box.r2_min, box.r2_max, eta_min, eta_max);
    Mat69 D = Mat69::Zero();
    D.block<3, 3>(0, 3) = Mat3::Identity() * w1;
    D.block<3, 3>(3, 6) = Mat3::Identity() * w2;
    return D;
}

Mat69 input_B_w() {
    Mat69 B = Mat69::Zero();
    B.block<3, 3>(3, 0).setIdentity();
    return B;
}

Mat36 output_C_z() {
    Mat36 C = Mat36::Zero();
    C.leftCols<3>().setIdentity();
    return C;
}

PlantMatrices PlantModel::at(const ParamPoint& rho) const {
    return {plant_A(rho, mu),       plant_b(rho, mu),
            input_B_w(),            measurement_C(rho),
            noise_D(rho, eta_min, eta_max, box), measurement_d(rho, mu),
            output_C_z()};
}

Eigen::MatrixXd lft_eval(const LftBlock& M, const Eigen::MatrixXd& Delta) {
    const auto n = M.M11.rows();
    if (M.M11.cols() != Delta.rows() || Delta.cols() != n || M.M12.rows() != n ||
        M.M21.cols() != Delta.rows() || M.M21.rows() != M.M22.rows() ||
        M.M12.cols() != M.M22.cols()) {
        throw std::invalid_argument("lft_eval: incompatible partition dimensions");
    }
    const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n) - M.M11 * Delta;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto& sv = svd.singularValues();
    const double smin = sv.size() ? sv(sv.size() - 1) : 1.0;
    if (sv.size() && (smin == 0.0 || sv(0) / smin > 1e12)) {
        throw IllPosed("I - M11*Delta is singular to working precision");
    }
    return M.M22 + M.M21 * Delta * X.partialPivLu().solve(M.M12);
}

LftBlock multiplicative_block(const UncertainParam& p) {
    LftBlock M;
    M.M11 = Eigen::MatrixXd::Zero(1, 1);
    M.M12 = Eigen::MatrixXd::Ones(1, 1);
    M.M21 = Eigen::MatrixXd::Constant(1, 1, p.nominal * p.spread);
    M.M22 = Eigen::MatrixXd::Constant(1, 1, p.nominal);
    return M;
}

std::vector<ParamPoint> param_grid(const ParamBox& box, int n1, int n2) {
    if (n1 < 2 || n2 < 2) {
        throw ValidationError("grid", "param_grid needs at least 2 points per axis");
    }
    std::vector<ParamPoint> grid;
    grid.reserve(static_cast<std::size_t>(n1 * n2));
    for (int i = 0; i < n1; ++i) {
        // Endpoints are hit exactly so the vertices belong to every grid.
        // The fraction i/(n-1) is formed first so nested grids share points.
        const double r1 = i == n1 - 1 ? box.r1_max
                                      : box.r1_min + (box.r1_max - box.r1_min) * (double(i) / (n1 - 1));
        for (int j = 0; j < n2; ++j) {
            const double r2 = j == n2 - 1 ? box.r2_max
                                          : box.r2_min + (box.r2_max - box.r2_min) * (double(j) / (n2 - 1));
            grid.push_back({r1, r2});
        }
    }
    return grid;
}

}  // namespace navsim
