#pragma once

#include <Eigen/Dense>

namespace bems {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

constexpr int kSlotsPerDay = 48;
constexpr int kSubslotsPerSlot = 30;
constexpr int kSubslotsPerDay = kSlotsPerDay * kSubslotsPerSlot;  // 1440
constexpr Real kSubslotSeconds = 60.0;
constexpr Real kSlotSeconds = 1800.0;

constexpr Real kStefanBoltzmann = 5.670374419e-8;  // W/m^2K^4
constexpr Real kCelsiusToKelvin = 273.15;

}  // namespace bems
