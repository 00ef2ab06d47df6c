#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace maketex {

// Orthographic camera on a sphere around the origin.
//
// World convention: the mesh front faces +Z and up is +Y. Azimuth 0 puts the
// camera on +Z looking down -Z; azimuth pi/2 puts it on +X. Elevation is
// positive above the XZ plane. View space is right-handed with the camera
// looking down -z; "depth" is the distance along the forward axis.
struct CameraPose {
  double azimuth = 0.0;
  double elevation = 0.0;
  double radius = 2.0;
  double ortho_half_extent = 1.1;
  int image_size = 1024;

  // Unit vector from the origin towards the camera.
  Eigen::Vector3d direction() const;
  Eigen::Vector3d position() const { return radius * direction(); }
  Eigen::Vector3d forward() const { return -direction(); }
  // d(direction)/d(elevation): +Y projected into the image plane, and the
  // azimuth-derived limit at the poles.
  Eigen::Vector3d up() const;
  Eigen::Vector3d right() const;

  // Depth range bracketing the unit ball.
  double near_plane() const { return radius - 1.0; }
  double far_plane() const { return radius + 1.0; }

  // Size of one pixel in world units.
  double pixel_size() const { return 2.0 * ortho_half_extent / image_size; }

  void validate() const;
};

inline constexpr double kDefaultRadius = 2.0;
inline constexpr double kDefaultHalfExtent = 1.1;

// Pose whose direction() equals `dir` (need not be normalized).
CameraPose pose_from_direction(const Eigen::Vector3d& dir, double radius, double ortho_half_extent = kDefaultHalfExtent,
                               int image_size = 1024);

// n poses on the golden-ratio spiral. Throws InvalidCount for n == 0.
std::vector<CameraPose> fibonacci_lattice(int n, double radius, double ortho_half_extent = kDefaultHalfExtent,
                                          int image_size = 1024);

std::pair<CameraPose, CameraPose> front_back_pair(double radius, double ortho_half_extent = kDefaultHalfExtent,
                                                  int image_size = 1024);

// World -> view: x right, y up, z = -depth.
Eigen::Matrix4d view_matrix(const CameraPose& pose);

// World -> clip for the orthographic frustum: x, y in [-1,1] across the
// image, z = (depth - near) / (far - near).
Eigen::Matrix4d view_transform(const CameraPose& pose);

enum class ViewLabel { Front, Back, LeftSide, RightSide, Top, Bottom, Side };

std::string_view to_string(ViewLabel label);

// Text appended to prompts: "front", "right side", ...
ViewLabel view_label(const CameraPose& pose);

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace maketex
