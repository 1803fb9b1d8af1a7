/* Minimal consumer of the hadlat C interface.
 *
 * Build (from the repository root, after `cargo build -p hadlat-ffi`):
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      -Ltarget/debug -lhadlat_ffi -lm -o demo
 *   LD_LIBRARY_PATH=target/debug ./demo
 */
#include <stdio.h>

#include "hadlat.h"

int main(void) {
  HadlatLattice *lattice = NULL;
  HadlatStatus status = hadlat_lattice_builtin("hadamard", 4, &lattice);
  if (status != HADLAT_STATUS_OK) {
    fprintf(stderr, "builtin: %s\n", hadlat_status_message(status));
    return 1;
  }

  double min_norm_sq = 0.0, min_l1 = 0.0;
  bool well_rounded = false;
  hadlat_lattice_min_norm_sq(lattice, &min_norm_sq);
  hadlat_lattice_min_l1_norm(lattice, 4.0, &min_l1);
  hadlat_lattice_is_well_rounded(lattice, &well_rounded);
  printf("dim %zu: min |t|^2 = %.6f, min L1 = %.6f, well-rounded = %d\n",
         hadlat_lattice_dim(lattice), min_norm_sq, min_l1, well_rounded);

  double rate = 0.0, stderr_ = 0.0;
  status = hadlat_error_rate(lattice, 4, 20.0, 8.0, 20000, 1, &rate, &stderr_);
  if (status != HADLAT_STATUS_OK) {
    fprintf(stderr, "error rate: %s\n", hadlat_status_message(status));
    hadlat_lattice_free(lattice);
    return 1;
  }
  printf("error rate at K=20, VNR 8 dB: %.5f (stderr %.5f)\n", rate, stderr_);

  hadlat_lattice_free(lattice);
  return 0;
}
