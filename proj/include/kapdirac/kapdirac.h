/* Shared-library interface. All handles are opaque; every call returns a
 * kd_status and leaves a thread-local message for kd_last_error(). */
#ifndef KAPDIRAC_H_
#define KAPDIRAC_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(KAPDIRAC_BUILDING)
#define KD_API __attribute__((visibility("default")))
#else
#define KD_API
#endif

typedef enum kd_status {
  KD_OK = 0,
  KD_ERR_CONFIG = 1,       /* malformed or incomplete input */
  KD_ERR_PRECONDITION = 2, /* value outside the model's validity domain */
  KD_ERR_CONVERGENCE = 3,  /* series or Krylov iteration did not converge */
  KD_ERR_IO = 4,
  KD_ERR_ARGUMENT = 5,     /* null pointer or bad index */
  KD_ERR_INTERNAL = 6
} kd_status;

typedef struct kd_setup kd_setup; /* beam + electron */
typedef struct kd_scan kd_scan;

typedef struct kd_kinematics {
  double omega, k_ph, A0, T, k_el, Omega;
} kd_kinematics;

typedef struct kd_couplings {
  double alpha_c, alpha_s, beta, global_phase_rate;
} kd_couplings;

KD_API const char* kd_version(void);
/* Message of the last failure on this thread; empty after success. */
KD_API const char* kd_last_error(void);
KD_API void kd_string_free(char* s);

KD_API kd_status kd_setup_from_json(const char* json_text, kd_setup** out);
KD_API kd_status kd_setup_from_file(const char* path, kd_setup** out);
KD_API kd_status kd_setup_to_json(const kd_setup* setup, char** out_json);
KD_API void kd_setup_free(kd_setup* setup);

KD_API kd_status kd_derive_kinematics(const kd_setup* setup, kd_kinematics* out);
/* Couplings after dt_over_T optical periods; x_m < 0 selects x = v_el * dt. */
KD_API kd_status kd_coupling_params(const kd_setup* setup, double dt_over_T, double x_m,
                                    kd_couplings* out);
KD_API kd_status kd_p_ponderomotive(const kd_setup* setup, int n, double x_m, double* out);
KD_API kd_status kd_p_absorptive(const kd_couplings* cp, int l, int o, double tol,
                                 double* probability, int* truncation);
KD_API kd_status kd_p_combined(const kd_couplings* cp, int l, int o, double tol,
                               double* probability, int* truncation);
/* l,o,probability,truncation,residual CSV for |l|,|o| <= max_order.
 * channel: 0 ponderomotive, 1 absorptive, 2 combined. */
KD_API kd_status kd_population_csv(const kd_couplings* cp, int channel, int max_order,
                                   double tol, char** out_csv);
KD_API kd_status kd_interference_criterion(double v_el, double* A0_cross);
KD_API kd_status kd_h1_h2_gap(const kd_setup* setup, double* gap_joule);

KD_API kd_status kd_scan_run_json(const char* spec_json, int workers, kd_scan** out);
KD_API kd_status kd_scan_run_file(const char* spec_path, int workers, kd_scan** out);
KD_API kd_status kd_scan_shape(const kd_scan* scan, int* n1, int* n2);
KD_API kd_status kd_scan_value(const kd_scan* scan, int i1, int i2, double* value, int* flag);
KD_API kd_status kd_scan_csv(const kd_scan* scan, char** out_csv);
/* Writes scan.csv (and scan.json when json_mirror != 0) into out_dir. */
KD_API kd_status kd_scan_write(const kd_scan* scan, const char* out_dir, int json_mirror);
KD_API void kd_scan_free(kd_scan* scan);

/* Propagates the TDSE run config, writes snapshots and final diagnostics. */
KD_API kd_status kd_tdse_run_file(const char* config_path, const char* out_dir, int json_mirror);
/* Reads snap_* files from snap_dir and writes spectrum/orders/ewald files. */
KD_API kd_status kd_analyze_dir(const char* snap_dir, const char* out_dir, int json_mirror);
/* Writes fields.csv from a setup file with an optional field_dump block. */
KD_API kd_status kd_fields_dump_file(const char* setup_path, const char* out_dir,
                                     int json_mirror);
/* Runs the invariant suite; *failed receives the number of failing checks. */
KD_API kd_status kd_check(int* failed, char** report);

#ifdef __cplusplus
}
#endif

#endif /* KAPDIRAC_H_ */
