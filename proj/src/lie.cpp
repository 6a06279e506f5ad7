/**
 * @file lie.cpp
 * @brief Implementation of the matrix Lie group operations.
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#include "kio/lie.hpp"

#include <cmath>
#include <utility>

#include <Eigen/SVD>

namespace kio::lie
{

namespace
{

/** Series-vs-closed-form switch for all trigonometric coefficient functions. */
bool smallAngle(double theta)
{
    return theta < tol::kSmallAngle;
}

/** sin(t)/t with 4th-order series fallback. */
double sincTheta(double theta)
{
    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(theta) / theta;
}

/** (1 - cos(t)) / t^2 with series fallback. */
double oneMinusCosOverT2(double theta)
{
    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    }
    return (1.0 - std::cos(theta)) / (theta * theta);
}

/** (t - sin(t)) / t^3 with series fallback. */
double tMinusSinOverT3(double theta)
{
    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    }
    return (theta - std::sin(theta)) / (theta * theta * theta);
}

void requireTangentDim(const TangentVector& a, const char* op)
{
    if (a.coords.size() != a.group.tangentDim())
    {
        throw DimensionError(std::string(op) + ": tangent has " + std::to_string(a.coords.size())
                             + " coordinates but " + a.group.name() + " needs "
                             + std::to_string(a.group.tangentDim()));
    }
}

void requireMatrixSize(const GroupId& g, const Eigen::MatrixXd& m, const char* op)
{
    if (m.rows() != g.matrixSize() || m.cols() != g.matrixSize())
    {
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x"
                             + std::to_string(m.cols()) + " but " + g.name() + " needs "
                             + std::to_string(g.matrixSize()) + "x"
                             + std::to_string(g.matrixSize()));
    }
}

void requirePattern(bool ok, const char* what)
{
    if (!ok)
    {
        throw PatternError(std::string("vee: matrix violates the algebra pattern (") + what + ")");
    }
}

} // namespace

// --- GroupId -----------------------------------------------------------------

GroupId GroupId::so3()
{
    GroupId g;
    g.m_tag = GroupTag::So3;
    g.m_matrixSize = 3;
    g.m_tangentDim = 3;
    return g;
}

GroupId GroupId::se3()
{
    GroupId g;
    g.m_tag = GroupTag::Se3;
    g.m_matrixSize = 4;
    g.m_tangentDim = 6;
    return g;
}

GroupId GroupId::se23()
{
    GroupId g;
    g.m_tag = GroupTag::Se23;
    g.m_matrixSize = 5;
    g.m_tangentDim = 9;
    return g;
}

GroupId GroupId::vec(int n)
{
    if (n < 1)
    {
        throw DimensionError("GroupId::vec: dimension must be positive");
    }
    GroupId g;
    g.m_tag = GroupTag::Vec;
    g.m_vecDim = n;
    g.m_matrixSize = n + 1;
    g.m_tangentDim = n;
    return g;
}

GroupId GroupId::composite(std::vector<GroupId> members)
{
    if (members.empty())
    {
        throw DimensionError("GroupId::composite: needs at least one member");
    }
    GroupId g;
    g.m_tag = GroupTag::Composite;
    g.m_members = std::move(members);
    g.m_matrixSize = 0;
    g.m_tangentDim = 0;
    for (const auto& member : g.m_members)
    {
        g.m_matrixSize += member.matrixSize();
        g.m_tangentDim += member.tangentDim();
    }
    return g;
}

bool GroupId::operator==(const GroupId& other) const
{
    if (m_tag != other.m_tag)
    {
        return false;
    }
    switch (m_tag)
    {
    case GroupTag::Vec:
        return m_vecDim == other.m_vecDim;
    case GroupTag::Composite:
        if (m_members.size() != other.m_members.size())
        {
            return false;
        }
        for (std::size_t i = 0; i < m_members.size(); ++i)
        {
            if (!(m_members[i] == other.m_members[i]))
            {
                return false;
            }
        }
        return true;
    default:
        return true;
    }
}

std::string GroupId::name() const
{
    switch (m_tag)
    {
    case GroupTag::So3:
        return "SO(3)";
    case GroupTag::Se3:
        return "SE(3)";
    case GroupTag::Se23:
        return "SE_2(3)";
    case GroupTag::Vec:
        return "T(" + std::to_string(m_vecDim) + ")";
    case GroupTag::Composite:
    {
        std::string out;
        for (std::size_t i = 0; i < m_members.size(); ++i)
        {
            if (i > 0)
            {
                out += " x ";
            }
            out += m_members[i].name();
        }
        return out;
    }
    }
    return "?";
}

std::vector<BlockLayout> blockLayout(const GroupId& g)
{
    std::vector<BlockLayout> layout;
    if (g.tag() != GroupTag::Composite)
    {
        layout.push_back({0, g.matrixSize(), 0, g.tangentDim()});
        return layout;
    }
    int mOff = 0;
    int tOff = 0;
    for (const auto& member : g.members())
    {
        layout.push_back({mOff, member.matrixSize(), tOff, member.tangentDim()});
        mOff += member.matrixSize();
        tOff += member.tangentDim();
    }
    return layout;
}

// --- SO(3) helpers -------------------------------------------------------------

Eigen::Matrix3d skew(const Eigen::Vector3d& w)
{
    Eigen::Matrix3d s;
    // clang-format off
    s <<     0.0, -w.z(),  w.y(),
          w.z(),    0.0, -w.x(),
         -w.y(),  w.x(),    0.0;
    // clang-format on
    return s;
}

Eigen::Matrix3d expSo3(const Eigen::Vector3d& phi)
{
    const double theta = phi.norm();
    const Eigen::Matrix3d s = skew(phi);
    return Eigen::Matrix3d::Identity() + sincTheta(theta) * s
           + oneMinusCosOverT2(theta) * s * s;
}

Eigen::Vector3d logSo3(const Eigen::Matrix3d& r)
{
    const double cosTheta = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    const double theta = std::acos(cosTheta);
    if (theta > M_PI - tol::kBranchGuard)
    {
        throw BranchError("logSo3: rotation angle within guard band of pi");
    }

    const Eigen::Vector3d skewPart(0.5 * (r(2, 1) - r(1, 2)), //
                                   0.5 * (r(0, 2) - r(2, 0)), //
                                   0.5 * (r(1, 0) - r(0, 1)));

    if (theta > 3.0)
    {
        // Near pi the skew part loses precision; recover the axis from the
        // symmetric part, which stays well conditioned, and the sign from the
        // skew part.
        const Eigen::Matrix3d sym = 0.5 * (r + r.transpose());
        const Eigen::Matrix3d outer
            = (sym - cosTheta * Eigen::Matrix3d::Identity()) / (1.0 - cosTheta);
        int pivot = 0;
        outer.diagonal().maxCoeff(&pivot);
        Eigen::Vector3d axis = outer.col(pivot) / std::sqrt(std::max(outer(pivot, pivot), 1e-300));
        axis.normalize();
        if (axis.dot(skewPart) < 0.0)
        {
            axis = -axis;
        }
        return theta * axis;
    }

    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        // theta / sin(theta) expanded around zero.
        const double scale = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
        return scale * skewPart;
    }
    return (theta / std::sin(theta)) * skewPart;
}

Eigen::Matrix3d leftJacobianSo3(const Eigen::Vector3d& phi)
{
    const double theta = phi.norm();
    const Eigen::Matrix3d s = skew(phi);
    return Eigen::Matrix3d::Identity() + oneMinusCosOverT2(theta) * s
           + tMinusSinOverT3(theta) * s * s;
}

Eigen::Matrix3d leftJacobianInvSo3(const Eigen::Vector3d& phi)
{
    const double theta = phi.norm();
    const Eigen::Matrix3d s = skew(phi);
    double coeff = 0.0;
    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        coeff = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    }
    else
    {
        coeff = 1.0 / (theta * theta)
                - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
    }
    return Eigen::Matrix3d::Identity() - 0.5 * s + coeff * s * s;
}

Eigen::Matrix3d leftJacobianQ(const Eigen::Vector3d& rho, const Eigen::Vector3d& phi)
{
    const double theta = phi.norm();
    const Eigen::Matrix3d rx = skew(rho);
    const Eigen::Matrix3d px = skew(phi);

    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    if (smallAngle(theta))
    {
        const double t2 = theta * theta;
        c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
        c3 = 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0;
        c4 = 1.0 / 120.0 - t2 / 2520.0 + t2 * t2 / 60480.0;
    }
    else
    {
        const double t2 = theta * theta;
        const double t4 = t2 * t2;
        const double st = std::sin(theta);
        const double ct = std::cos(theta);
        c2 = (theta - st) / (t2 * theta);
        c3 = (t2 + 2.0 * ct - 2.0) / (2.0 * t4);
        c4 = (2.0 * theta - 3.0 * st + theta * ct) / (2.0 * t4 * theta);
    }

    return 0.5 * rx //
           + c2 * (px * rx + rx * px + px * rx * px)
           + c3 * (px * px * rx + rx * px * px - 3.0 * px * rx * px)
           + c4 * (px * rx * px * px + px * px * rx * px);
}

Eigen::Matrix3d polarRotation(const Eigen::Matrix3d& m)
{
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0)
    {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

// --- generic operations --------------------------------------------------------

GroupElement identity(const GroupId& g)
{
    return {g, Eigen::MatrixXd::Identity(g.matrixSize(), g.matrixSize())};
}

Eigen::MatrixXd hat(const TangentVector& a)
{
    requireTangentDim(a, "hat");
    const GroupId& g = a.group;
    const int n = g.matrixSize();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);

    switch (g.tag())
    {
    case GroupTag::So3:
        m = skew(a.coords);
        break;
    case GroupTag::Se3:
        m.topLeftCorner<3, 3>() = skew(a.coords.segment<3>(3));
        m.block<3, 1>(0, 3) = a.coords.head<3>();
        break;
    case GroupTag::Se23:
        m.topLeftCorner<3, 3>() = skew(a.coords.segment<3>(3));
        m.block<3, 1>(0, 3) = a.coords.head<3>();
        m.block<3, 1>(0, 4) = a.coords.segment<3>(6);
        break;
    case GroupTag::Vec:
        m.block(0, n - 1, n - 1, 1) = a.coords;
        break;
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            m.block(b.matrixOffset, b.matrixOffset, b.matrixSize, b.matrixSize)
                = hat({members[i], a.coords.segment(b.tangentOffset, b.tangentDim)});
        }
        break;
    }
    }
    return m;
}

TangentVector vee(const GroupId& g, const Eigen::MatrixXd& m)
{
    requireMatrixSize(g, m, "vee");
    Eigen::VectorXd coords(g.tangentDim());

    const auto checkSkew = [](const Eigen::Matrix3d& s) {
        return (s + s.transpose()).cwiseAbs().maxCoeff() <= tol::kPattern;
    };

    switch (g.tag())
    {
    case GroupTag::So3:
    {
        requirePattern(checkSkew(m), "3x3 block not skew-symmetric");
        coords << m(2, 1), m(0, 2), m(1, 0);
        break;
    }
    case GroupTag::Se3:
    {
        requirePattern(checkSkew(m.topLeftCorner<3, 3>()), "rotation block not skew-symmetric");
        requirePattern(m.row(3).cwiseAbs().maxCoeff() <= tol::kPattern, "last row not zero");
        coords.head<3>() = m.block<3, 1>(0, 3);
        coords.segment<3>(3) << m(2, 1), m(0, 2), m(1, 0);
        break;
    }
    case GroupTag::Se23:
    {
        requirePattern(checkSkew(m.topLeftCorner<3, 3>()), "rotation block not skew-symmetric");
        requirePattern(m.bottomRows<2>().cwiseAbs().maxCoeff() <= tol::kPattern,
                       "last two rows not zero");
        coords.head<3>() = m.block<3, 1>(0, 3);
        coords.segment<3>(3) << m(2, 1), m(0, 2), m(1, 0);
        coords.segment<3>(6) = m.block<3, 1>(0, 4);
        break;
    }
    case GroupTag::Vec:
    {
        const int n = g.matrixSize();
        requirePattern(m.leftCols(n - 1).cwiseAbs().maxCoeff() <= tol::kPattern,
                       "non-translation entries not zero");
        requirePattern(std::abs(m(n - 1, n - 1)) <= tol::kPattern, "corner not zero");
        coords = m.block(0, n - 1, n - 1, 1);
        break;
    }
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        // Off-diagonal coupling between members is not part of the algebra.
        Eigen::MatrixXd offDiag = m;
        for (const auto& b : layout)
        {
            offDiag.block(b.matrixOffset, b.matrixOffset, b.matrixSize, b.matrixSize).setZero();
        }
        requirePattern(offDiag.cwiseAbs().maxCoeff() <= tol::kPattern,
                       "cross-member blocks not zero");
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            coords.segment(b.tangentOffset, b.tangentDim)
                = vee(members[i],
                      m.block(b.matrixOffset, b.matrixOffset, b.matrixSize, b.matrixSize))
                      .coords;
        }
        break;
    }
    }
    return {g, coords};
}

GroupElement expHat(const TangentVector& a)
{
    requireTangentDim(a, "expHat");
    const GroupId& g = a.group;
    const int n = g.matrixSize();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);

    switch (g.tag())
    {
    case GroupTag::So3:
        m = expSo3(a.coords);
        break;
    case GroupTag::Se3:
    {
        const Eigen::Vector3d rho = a.coords.head<3>();
        const Eigen::Vector3d phi = a.coords.segment<3>(3);
        m.topLeftCorner<3, 3>() = expSo3(phi);
        m.block<3, 1>(0, 3) = leftJacobianSo3(phi) * rho;
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Vector3d rho = a.coords.head<3>();
        const Eigen::Vector3d phi = a.coords.segment<3>(3);
        const Eigen::Vector3d nu = a.coords.segment<3>(6);
        const Eigen::Matrix3d jl = leftJacobianSo3(phi);
        m.topLeftCorner<3, 3>() = expSo3(phi);
        m.block<3, 1>(0, 3) = jl * rho;
        m.block<3, 1>(0, 4) = jl * nu;
        break;
    }
    case GroupTag::Vec:
        m.block(0, n - 1, n - 1, 1) = a.coords;
        break;
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            m.block(b.matrixOffset, b.matrixOffset, b.matrixSize, b.matrixSize)
                = expHat({members[i], a.coords.segment(b.tangentOffset, b.tangentDim)}).matrix;
        }
        break;
    }
    }
    return {g, m};
}

TangentVector logVee(const GroupElement& x)
{
    requireMatrixSize(x.group, x.matrix, "logVee");
    const GroupId& g = x.group;
    Eigen::VectorXd coords(g.tangentDim());

    switch (g.tag())
    {
    case GroupTag::So3:
        coords = logSo3(x.matrix);
        break;
    case GroupTag::Se3:
    {
        const Eigen::Vector3d phi = logSo3(x.matrix.topLeftCorner<3, 3>());
        coords.segment<3>(3) = phi;
        coords.head<3>() = leftJacobianInvSo3(phi) * x.matrix.block<3, 1>(0, 3);
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Vector3d phi = logSo3(x.matrix.topLeftCorner<3, 3>());
        const Eigen::Matrix3d jinv = leftJacobianInvSo3(phi);
        coords.segment<3>(3) = phi;
        coords.head<3>() = jinv * x.matrix.block<3, 1>(0, 3);
        coords.segment<3>(6) = jinv * x.matrix.block<3, 1>(0, 4);
        break;
    }
    case GroupTag::Vec:
        coords = x.matrix.block(0, g.matrixSize() - 1, g.matrixSize() - 1, 1);
        break;
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            coords.segment(b.tangentOffset, b.tangentDim)
                = logVee({members[i],
                          x.matrix.block(b.matrixOffset, b.matrixOffset, b.matrixSize,
                                         b.matrixSize)})
                      .coords;
        }
        break;
    }
    }
    return {g, coords};
}

Eigen::MatrixXd adjoint(const GroupElement& x)
{
    requireMatrixSize(x.group, x.matrix, "adjoint");
    const GroupId& g = x.group;
    const int d = g.tangentDim();
    Eigen::MatrixXd ad = Eigen::MatrixXd::Identity(d, d);

    switch (g.tag())
    {
    case GroupTag::So3:
        ad = x.matrix;
        break;
    case GroupTag::Se3:
    {
        const Eigen::Matrix3d r = x.matrix.topLeftCorner<3, 3>();
        const Eigen::Vector3d t = x.matrix.block<3, 1>(0, 3);
        ad.topLeftCorner<3, 3>() = r;
        ad.block<3, 3>(0, 3) = skew(t) * r;
        ad.block<3, 3>(3, 3) = r;
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Matrix3d r = x.matrix.topLeftCorner<3, 3>();
        const Eigen::Vector3d p = x.matrix.block<3, 1>(0, 3);
        const Eigen::Vector3d v = x.matrix.block<3, 1>(0, 4);
        ad.topLeftCorner<3, 3>() = r;
        ad.block<3, 3>(0, 3) = skew(p) * r;
        ad.block<3, 3>(3, 3) = r;
        ad.block<3, 3>(6, 3) = skew(v) * r;
        ad.block<3, 3>(6, 6) = r;
        break;
    }
    case GroupTag::Vec:
        break; // identity
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            ad.block(b.tangentOffset, b.tangentOffset, b.tangentDim, b.tangentDim)
                = adjoint({members[i],
                           x.matrix.block(b.matrixOffset, b.matrixOffset, b.matrixSize,
                                          b.matrixSize)});
        }
        break;
    }
    }
    return ad;
}

Eigen::MatrixXd adMatrix(const TangentVector& a)
{
    requireTangentDim(a, "adMatrix");
    const GroupId& g = a.group;
    const int d = g.tangentDim();
    Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(d, d);

    switch (g.tag())
    {
    case GroupTag::So3:
        ad = skew(a.coords);
        break;
    case GroupTag::Se3:
    {
        const Eigen::Matrix3d px = skew(a.coords.segment<3>(3));
        ad.topLeftCorner<3, 3>() = px;
        ad.block<3, 3>(0, 3) = skew(a.coords.head<3>());
        ad.block<3, 3>(3, 3) = px;
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Matrix3d px = skew(a.coords.segment<3>(3));
        ad.topLeftCorner<3, 3>() = px;
        ad.block<3, 3>(0, 3) = skew(a.coords.head<3>());
        ad.block<3, 3>(3, 3) = px;
        ad.block<3, 3>(6, 3) = skew(a.coords.segment<3>(6));
        ad.block<3, 3>(6, 6) = px;
        break;
    }
    case GroupTag::Vec:
        break; // abelian: zero
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            ad.block(b.tangentOffset, b.tangentOffset, b.tangentDim, b.tangentDim)
                = adMatrix({members[i], a.coords.segment(b.tangentOffset, b.tangentDim)});
        }
        break;
    }
    }
    return ad;
}

Eigen::MatrixXd leftJacobian(const TangentVector& a)
{
    requireTangentDim(a, "leftJacobian");
    const GroupId& g = a.group;
    const int d = g.tangentDim();
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(d, d);

    switch (g.tag())
    {
    case GroupTag::So3:
        j = leftJacobianSo3(a.coords);
        break;
    case GroupTag::Se3:
    {
        const Eigen::Vector3d rho = a.coords.head<3>();
        const Eigen::Vector3d phi = a.coords.segment<3>(3);
        const Eigen::Matrix3d jl = leftJacobianSo3(phi);
        j.topLeftCorner<3, 3>() = jl;
        j.block<3, 3>(0, 3) = leftJacobianQ(rho, phi);
        j.block<3, 3>(3, 3) = jl;
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Vector3d rho = a.coords.head<3>();
        const Eigen::Vector3d phi = a.coords.segment<3>(3);
        const Eigen::Vector3d nu = a.coords.segment<3>(6);
        const Eigen::Matrix3d jl = leftJacobianSo3(phi);
        j.topLeftCorner<3, 3>() = jl;
        j.block<3, 3>(0, 3) = leftJacobianQ(rho, phi);
        j.block<3, 3>(3, 3) = jl;
        j.block<3, 3>(6, 3) = leftJacobianQ(nu, phi);
        j.block<3, 3>(6, 6) = jl;
        break;
    }
    case GroupTag::Vec:
        break; // identity
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            j.block(b.tangentOffset, b.tangentOffset, b.tangentDim, b.tangentDim)
                = leftJacobian({members[i], a.coords.segment(b.tangentOffset, b.tangentDim)});
        }
        break;
    }
    }
    return j;
}

Eigen::MatrixXd rightJacobian(const TangentVector& a)
{
    return leftJacobian({a.group, -a.coords});
}

namespace
{

/** Re-orthonormalize every rotation block whose drift exceeds the tolerance. */
void renormalizeRotations(const GroupId& g, Eigen::MatrixXd& m)
{
    const auto fixBlock = [&m](int offset) {
        const Eigen::Matrix3d r = m.block<3, 3>(offset, offset);
        const double err = (r.transpose() * r - Eigen::Matrix3d::Identity())
                               .cwiseAbs()
                               .maxCoeff();
        if (err > tol::kOrthonormality)
        {
            m.block<3, 3>(offset, offset) = polarRotation(r);
        }
    };

    switch (g.tag())
    {
    case GroupTag::So3:
    case GroupTag::Se3:
    case GroupTag::Se23:
        fixBlock(0);
        break;
    case GroupTag::Vec:
        break;
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            if (members[i].tag() == GroupTag::Vec)
            {
                continue;
            }
            Eigen::MatrixXd sub
                = m.block(layout[i].matrixOffset, layout[i].matrixOffset, layout[i].matrixSize,
                          layout[i].matrixSize);
            renormalizeRotations(members[i], sub);
            m.block(layout[i].matrixOffset, layout[i].matrixOffset, layout[i].matrixSize,
                    layout[i].matrixSize)
                = sub;
        }
        break;
    }
    }
}

} // namespace

GroupElement compose(const GroupElement& x, const GroupElement& y)
{
    if (x.group != y.group)
    {
        throw GroupMismatchError("compose: operands belong to " + x.group.name() + " and "
                                 + y.group.name());
    }
    requireMatrixSize(x.group, x.matrix, "compose");
    requireMatrixSize(y.group, y.matrix, "compose");

    GroupElement out{x.group, x.matrix * y.matrix};
    renormalizeRotations(out.group, out.matrix);
    return out;
}

GroupElement inverse(const GroupElement& x)
{
    requireMatrixSize(x.group, x.matrix, "inverse");
    const GroupId& g = x.group;
    const int n = g.matrixSize();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);

    switch (g.tag())
    {
    case GroupTag::So3:
        m = x.matrix.transpose();
        break;
    case GroupTag::Se3:
    {
        const Eigen::Matrix3d rt = x.matrix.topLeftCorner<3, 3>().transpose();
        m.topLeftCorner<3, 3>() = rt;
        m.block<3, 1>(0, 3) = -rt * x.matrix.block<3, 1>(0, 3);
        break;
    }
    case GroupTag::Se23:
    {
        const Eigen::Matrix3d rt = x.matrix.topLeftCorner<3, 3>().transpose();
        m.topLeftCorner<3, 3>() = rt;
        m.block<3, 1>(0, 3) = -rt * x.matrix.block<3, 1>(0, 3);
        m.block<3, 1>(0, 4) = -rt * x.matrix.block<3, 1>(0, 4);
        break;
    }
    case GroupTag::Vec:
        m.block(0, n - 1, n - 1, 1) = -x.matrix.block(0, n - 1, n - 1, 1);
        break;
    case GroupTag::Composite:
    {
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            m.block(b.matrixOffset, b.matrixOffset, b.matrixSize, b.matrixSize)
                = inverse({members[i],
                           x.matrix.block(b.matrixOffset, b.matrixOffset, b.matrixSize,
                                          b.matrixSize)})
                      .matrix;
        }
        break;
    }
    }
    return {g, m};
}

double orthonormalityError(const GroupElement& x)
{
    requireMatrixSize(x.group, x.matrix, "orthonormalityError");
    const GroupId& g = x.group;

    switch (g.tag())
    {
    case GroupTag::So3:
    case GroupTag::Se3:
    case GroupTag::Se23:
    {
        const Eigen::Matrix3d r = x.matrix.topLeftCorner<3, 3>();
        return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    }
    case GroupTag::Vec:
        return 0.0;
    case GroupTag::Composite:
    {
        double worst = 0.0;
        const auto layout = blockLayout(g);
        const auto& members = g.members();
        for (std::size_t i = 0; i < members.size(); ++i)
        {
            const auto& b = layout[i];
            worst = std::max(worst,
                             orthonormalityError(
                                 {members[i],
                                  x.matrix.block(b.matrixOffset, b.matrixOffset, b.matrixSize,
                                                 b.matrixSize)}));
        }
        return worst;
    }
    }
    return 0.0;
}

} // namespace kio::lie
