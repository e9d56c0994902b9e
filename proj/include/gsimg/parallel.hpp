#pragma once

namespace gsimg {

/// Number of OpenMP workers used by the rasterizer and metrics kernels.
/// n <= 0 restores the OpenMP default. Results of render/render_backward do
/// not depend on this value; a count of 1 makes every kernel strictly serial.
void set_worker_count(int n);
int worker_count();

/// Reads GSIMG_WORKERS; returns 0 when unset or unparsable.
int worker_count_from_env();

}  // namespace gsimg
