#include "maketex/camera.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "maketex/error.hpp"

namespace maketex {

using std::numbers::pi;

Eigen::Vector3d CameraPose::direction() const {
  const double ce = std::cos(elevation);
  return {ce * std::sin(azimuth), std::sin(elevation), ce * std::cos(azimuth)};
}

Eigen::Vector3d CameraPose::up() const {
  const double se = std::sin(elevation);
  return Eigen::Vector3d(-se * std::sin(azimuth), std::cos(elevation), -se * std::cos(azimuth)).normalized();
}

Eigen::Vector3d CameraPose::right() const { return forward().cross(up()).normalized(); }

void CameraPose::validate() const {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "camera radius must be positive");
  if (!(ortho_half_extent >= 1.0)) throw Error(Errc::InvalidArgument, "ortho half extent must be >= 1");
  if (image_size <= 0) throw Error(Errc::InvalidArgument, "image size must be positive");
  if (!(std::abs(elevation) <= pi / 2 + 1e-12)) throw Error(Errc::InvalidArgument, "elevation outside [-pi/2, pi/2]");
}

double wrap_angle(double a) {
  a = std::remainder(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  return a;
}

CameraPose pose_from_direction(const Eigen::Vector3d& dir, double radius, double ortho_half_extent, int image_size) {
  const Eigen::Vector3d d = dir.normalized();
  CameraPose pose;
  pose.elevation = std::asin(std::clamp(d.y(), -1.0, 1.0));
  pose.azimuth = wrap_angle(std::atan2(d.x(), d.z()));
  pose.radius = radius;
  pose.ortho_half_extent = ortho_half_extent;
  pose.image_size = image_size;
  return pose;
}

std::vector<CameraPose> fibonacci_lattice(int n, double radius, double ortho_half_extent, int image_size) {
  if (n < 1) throw Error(Errc::InvalidCount, "lattice needs at least one point");
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "lattice radius must be positive");
  const double inv_phi = 1.0 / std::numbers::phi;
  std::vector<CameraPose> poses;
  poses.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double y = 1.0 - (2.0 * k + 1.0) / n;
    const double ring = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double angle = 2 * pi * k * inv_phi;
    poses.push_back(pose_from_direction({std::cos(angle) * ring, y, std::sin(angle) * ring}, radius,
                                        ortho_half_extent, image_size));
  }
  return poses;
}

std::pair<CameraPose, CameraPose> front_back_pair(double radius, double ortho_half_extent, int image_size) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "camera radius must be positive");
  CameraPose front{0.0, 0.0, radius, ortho_half_extent, image_size};
  CameraPose back{pi, 0.0, radius, ortho_half_extent, image_size};
  return {front, back};
}

Eigen::Matrix4d view_matrix(const CameraPose& pose) {
  const Eigen::Vector3d r = pose.right();
  const Eigen::Vector3d u = pose.up();
  const Eigen::Vector3d back = pose.direction();
  const Eigen::Vector3d eye = pose.position();
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<1, 3>(0, 0) = r.transpose();
  m.block<1, 3>(1, 0) = u.transpose();
  m.block<1, 3>(2, 0) = back.transpose();
  m(0, 3) = -r.dot(eye);
  m(1, 3) = -u.dot(eye);
  m(2, 3) = -back.dot(eye);
  return m;
}

Eigen::Matrix4d view_transform(const CameraPose& pose) {
  const double h = pose.ortho_half_extent;
  const double n = pose.near_plane();
  const double f = pose.far_plane();
  Eigen::Matrix4d proj = Eigen::Matrix4d::Zero();
  proj(0, 0) = 1.0 / h;
  proj(1, 1) = 1.0 / h;
  // view z = -depth, so clip z = (-z_view - n) / (f - n).
  proj(2, 2) = -1.0 / (f - n);
  proj(2, 3) = -n / (f - n);
  proj(3, 3) = 1.0;
  return proj * view_matrix(pose);
}

std::string_view to_string(ViewLabel label) {
  switch (label) {
    case ViewLabel::Front: return "front";
    case ViewLabel::Back: return "back";
    case ViewLabel::LeftSide: return "left side";
    case ViewLabel::RightSide: return "right side";
    case ViewLabel::Top: return "top";
    case ViewLabel::Bottom: return "bottom";
    case ViewLabel::Side: return "side";
  }
  return "side";
}

ViewLabel view_label(const CameraPose& pose) {
  const double az = wrap_angle(pose.azimuth);
  const double el = pose.elevation;
  if (std::abs(az) <= pi / 8 && std::abs(el) <= pi / 4) return ViewLabel::Front;
  if (std::abs(wrap_angle(az - pi)) <= pi / 8 && std::abs(el) <= pi / 4) return ViewLabel::Back;
  if (el > pi / 3) return ViewLabel::Top;
  if (el < -pi / 3) return ViewLabel::Bottom;
  if (std::abs(az - pi / 2) <= pi / 4) return ViewLabel::RightSide;
  if (std::abs(az + pi / 2) <= pi / 4) return ViewLabel::LeftSide;
  return ViewLabel::Side;
}

}  // namespace maketex
