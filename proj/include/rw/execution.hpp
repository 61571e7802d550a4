#pragma once

namespace rw {

/// Selects the OpenMP kernels or the serial reference path they are tested against.
enum class Execution { kSerial, kParallel };

}  // namespace rw
