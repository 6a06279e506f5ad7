/**
 * @file lie.hpp
 * @brief Matrix Lie groups for proprioceptive state estimation: SO(3), SE(3),
 *        the extended pose group SE_2(3), the translation group T(n), and
 *        block-diagonal composites of these.
 *
 * Conventions used throughout:
 *  - Every group element is stored as its square homogeneous matrix embedding.
 *  - Tangent coordinates are ordered (translation-like, rotation-like):
 *      SO(3):   (phi)                       dim 3
 *      SE(3):   (rho, phi)                  dim 6   [linear, angular]
 *      SE_2(3): (rho, phi, nu)              dim 9   [position, rotation, velocity]
 *      T(n):    (x)                         dim n
 *      composite: member coordinates concatenated in member order.
 *  - exp/log use the left (world-side) Jacobian convention; the right Jacobian
 *    is provided via Jr(a) = Jl(-a).
 *
 * SPDX-License-Identifier: BSD-3-Clause
 */

#ifndef KIO_LIE_HPP
#define KIO_LIE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kio/errors.hpp"

namespace kio::lie
{

/** Numerical policy constants shared by all group operations. */
namespace tol
{
/** Below this rotation angle the closed forms switch to 4th-order Taylor series. */
inline constexpr double kSmallAngle = 1e-6;
/** log raises BranchError when the rotation angle is within this of pi. */
inline constexpr double kBranchGuard = 1e-6;
/** Composition re-orthonormalizes a rotation block when ||R^T R - I||_inf exceeds this. */
inline constexpr double kOrthonormality = 1e-9;
/** Absolute tolerance for algebra sparsity-pattern validation in vee(). */
inline constexpr double kPattern = 1e-12;
} // namespace tol

enum class GroupTag
{
    So3,
    Se3,
    Se23,
    Vec,
    Composite
};

/**
 * Identifier of a matrix Lie group. Cheap to copy and compare; composite
 * groups own the identifiers of their members.
 */
class GroupId
{
public:
    /** Default-constructed ids are SO(3); use the factories for other groups. */
    GroupId() = default;

    static GroupId so3();
    static GroupId se3();
    static GroupId se23();
    /** Translation group T(n) embedded as [[I_n, x], [0, 1]]. */
    static GroupId vec(int n);
    /** Direct product embedded block-diagonally, members in the given order. */
    static GroupId composite(std::vector<GroupId> members);

    GroupTag tag() const { return m_tag; }
    /** Side length of the square matrix embedding. */
    int matrixSize() const { return m_matrixSize; }
    /** Dimension of the tangent (coordinate) space. */
    int tangentDim() const { return m_tangentDim; }
    /** Members of a composite group; empty for leaf groups. */
    const std::vector<GroupId>& members() const { return m_members; }
    /** Vector dimension n of T(n); only valid when tag() == Vec. */
    int vecDim() const { return m_vecDim; }

    bool operator==(const GroupId& other) const;
    bool operator!=(const GroupId& other) const { return !(*this == other); }

    /** Human-readable name used in error messages, e.g. "SE_2(3) x T(6)". */
    std::string name() const;

private:
    GroupTag m_tag{GroupTag::So3};
    int m_vecDim{0};
    int m_matrixSize{3};
    int m_tangentDim{3};
    std::vector<GroupId> m_members;
};

/** Tangent coordinates attached to the group they parametrize. */
struct TangentVector
{
    GroupId group;
    Eigen::VectorXd coords;
};

/** Group element stored as its matrix embedding. */
struct GroupElement
{
    GroupId group;
    Eigen::MatrixXd matrix;
};

/** Matrix/tangent placement of each member of a (possibly composite) group. */
struct BlockLayout
{
    int matrixOffset{0};
    int matrixSize{0};
    int tangentOffset{0};
    int tangentDim{0};
};

/** One layout entry per member (a single entry for leaf groups). */
std::vector<BlockLayout> blockLayout(const GroupId& g);

// --- SO(3) fixed-size helpers ------------------------------------------------

/** 3x3 skew-symmetric (cross-product) matrix of w. */
Eigen::Matrix3d skew(const Eigen::Vector3d& w);

/** Rodrigues exponential with series fallback below tol::kSmallAngle. */
Eigen::Matrix3d expSo3(const Eigen::Vector3d& phi);

/**
 * Principal-branch rotation logarithm. Uses symmetric-part axis extraction for
 * angles above 3.0 rad and raises BranchError within tol::kBranchGuard of pi.
 */
Eigen::Vector3d logSo3(const Eigen::Matrix3d& r);

/** Left Jacobian of SO(3). */
Eigen::Matrix3d leftJacobianSo3(const Eigen::Vector3d& phi);

/** Inverse left Jacobian of SO(3) (series below tol::kSmallAngle). */
Eigen::Matrix3d leftJacobianInvSo3(const Eigen::Vector3d& phi);

/**
 * Translation-rotation coupling block of the SE(3)/SE_2(3) left Jacobian for a
 * translation-like coordinate rho paired with rotation coordinate phi.
 */
Eigen::Matrix3d leftJacobianQ(const Eigen::Vector3d& rho, const Eigen::Vector3d& phi);

/** Orthonormal polar factor of a near-rotation matrix (closest rotation). */
Eigen::Matrix3d polarRotation(const Eigen::Matrix3d& m);

// --- generic group operations ------------------------------------------------

/** Identity element of g. */
GroupElement identity(const GroupId& g);

/** Lie-algebra matrix of tangent coordinates a (the "hat" map). */
Eigen::MatrixXd hat(const TangentVector& a);

/**
 * Tangent coordinates of an algebra matrix (the "vee" map). Validates the
 * algebra sparsity pattern to tol::kPattern and raises PatternError otherwise.
 */
TangentVector vee(const GroupId& g, const Eigen::MatrixXd& m);

/** Group exponential exp(hat(a)). */
GroupElement expHat(const TangentVector& a);

/** Tangent coordinates of the group logarithm, vee(log(X)). */
TangentVector logVee(const GroupElement& x);

/** Adjoint matrix Ad_X acting on tangent coordinates. */
Eigen::MatrixXd adjoint(const GroupElement& x);

/** Algebra adjoint ad_a (matrix commutator in coordinates). */
Eigen::MatrixXd adMatrix(const TangentVector& a);

/** Left Jacobian Jl(a) of the group exponential. */
Eigen::MatrixXd leftJacobian(const TangentVector& a);

/** Right Jacobian, Jr(a) = Jl(-a). */
Eigen::MatrixXd rightJacobian(const TangentVector& a);

/**
 * Group composition x * y. Rotation blocks are re-orthonormalized through the
 * polar factor when their orthonormality error exceeds tol::kOrthonormality.
 */
GroupElement compose(const GroupElement& x, const GroupElement& y);

/** Structure-exploiting exact inverse (no general matrix inversion). */
GroupElement inverse(const GroupElement& x);

/** Max over rotation blocks of ||R^T R - I||_inf; 0 for purely vector groups. */
double orthonormalityError(const GroupElement& x);

} // namespace kio::lie

#endif // KIO_LIE_HPP
