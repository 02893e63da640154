#ifndef CSGNASH_H
#define CSGNASH_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CSGN_API __declspec(dllexport)
#else
#define CSGN_API __attribute__((visibility("default")))
#endif

/* Status codes. Every failing call also records a message retrievable with
 * csgn_last_error() on the calling thread. */
typedef enum csgn_status {
    CSGN_OK = 0,
    CSGN_ERR_SYNTAX,
    CSGN_ERR_UNDECLARED_SYMBOL,
    CSGN_ERR_TYPE,
    CSGN_ERR_ALPHABET_VIOLATION,
    CSGN_ERR_UNDEFINED_CONSTANT,
    CSGN_ERR_UPDATE_CLASH,
    CSGN_ERR_PROBABILITY_SUM,
    CSGN_ERR_RANGE_OVERFLOW,
    CSGN_ERR_UNKNOWN_PLAYER,
    CSGN_ERR_COALITION_NOT_PARTITION,
    CSGN_ERR_UNKNOWN_REWARD,
    CSGN_ERR_BAD_THRESHOLD,
    CSGN_ERR_EMPTY_COALITION,
    CSGN_ERR_FULL_COALITION,
    CSGN_ERR_EMPTY_LIST,
    CSGN_ERR_DIMENSION_MISMATCH,
    CSGN_ERR_INCOMPLETE_STRATEGY,
    CSGN_ERR_INFINITE_VALUE,
    CSGN_ERR_NOT_CONVERGED,
    CSGN_ERR_UNSUPPORTED,
    CSGN_ERR_ASSUMPTION_VIOLATION,
    CSGN_ERR_IO,
    CSGN_ERR_INVALID_ARGUMENT,
    CSGN_ERR_INTERNAL
} csgn_status;

typedef struct csgn_model csgn_model;
typedef struct csgn_result csgn_result;

CSGN_API const char* csgn_last_error(void);
CSGN_API const char* csgn_status_name(csgn_status status);
CSGN_API const char* csgn_version(void);

/* Releases strings returned as `char*` by this library. */
CSGN_API void csgn_string_free(char* s);

/* ---- models ---------------------------------------------------------- */

/* Loads a guarded-command model or an explicit-state game. `overrides` holds
 * `count` entries of the form "NAME=VALUE". */
CSGN_API csgn_status csgn_model_load(const char* path, const char* const* overrides, size_t count, csgn_model** out);
CSGN_API csgn_status csgn_model_load_text(const char* text, const char* const* overrides, size_t count,
                                          csgn_model** out);
CSGN_API void csgn_model_free(csgn_model* model);

CSGN_API size_t csgn_model_num_states(const csgn_model* model);
CSGN_API size_t csgn_model_num_choices(const csgn_model* model);
CSGN_API size_t csgn_model_num_transitions(const csgn_model* model);
CSGN_API size_t csgn_model_num_players(const csgn_model* model);
CSGN_API const char* csgn_model_player_name(const csgn_model* model, size_t player);
CSGN_API double csgn_model_build_seconds(const csgn_model* model);
/* 1 if the model declares (or was given) a constant of that name. */
CSGN_API int csgn_model_has_constant(const csgn_model* model, const char* name);
/* Explicit-state text of the built game. */
CSGN_API char* csgn_model_export_explicit(const csgn_model* model);

/* ---- property checking ------------------------------------------------ */

typedef struct csgn_options {
    double conv_epsilon;      /* value-iteration convergence bound */
    size_t max_iterations;
    double mdp_epsilon;       /* MDP sub-solves */
    int exact;                /* rational value iteration */
    int strict_assumptions;   /* fail when the convergence assumption is violated */
    int verify;               /* check the synthesised profile for an epsilon-NE */
    double verify_epsilon;
    unsigned threads;
    size_t trace_limit;       /* iterations recorded at the initial states */
} csgn_options;

CSGN_API void csgn_options_default(csgn_options* options);

/* Parses and evaluates one property. `defines` adds "NAME=VALUE" constants
 * visible to the property only (e.g. a step bound). */
CSGN_API csgn_status csgn_check(const csgn_model* model, const char* property, const csgn_options* options,
                                const char* const* defines, size_t define_count, csgn_result** out);
CSGN_API void csgn_result_free(csgn_result* result);

/* Normalised property text. */
CSGN_API const char* csgn_result_property(const csgn_result* r);
/* 1 for max=?/min=? queries, 0 for boolean ones. */
CSGN_API int csgn_result_numerical(const csgn_result* r);
/* Boolean queries: 1 if every initial state satisfies the property. */
CSGN_API int csgn_result_holds(const csgn_result* r);
/* 1 if the property is a Nash formula (pair and sum are meaningful). */
CSGN_API int csgn_result_is_nash(const csgn_result* r);
/* Zero-sum numerical value at the initial state. */
CSGN_API double csgn_result_value(const csgn_result* r);
CSGN_API double csgn_result_sum(const csgn_result* r);
CSGN_API double csgn_result_player_value(const csgn_result* r, int side);
/* Exact value of one side ("3/4"), or NULL when values were computed in floating point. */
CSGN_API const char* csgn_result_exact_value(const csgn_result* r, int side);

CSGN_API int csgn_result_converged(const csgn_result* r);
CSGN_API int csgn_result_oscillating(const csgn_result* r);
CSGN_API size_t csgn_result_iterations(const csgn_result* r);
CSGN_API double csgn_result_mdp_seconds(const csgn_result* r);
CSGN_API double csgn_result_csg_seconds(const csgn_result* r);
CSGN_API size_t csgn_result_num_warnings(const csgn_result* r);
CSGN_API const char* csgn_result_warning(const csgn_result* r, size_t index);

/* Assumption check of the top-level Nash node: -1 not checked, 0 violated, 1 holds. */
CSGN_API int csgn_result_assumption(const csgn_result* r);

/* Verification report (requires options.verify). */
CSGN_API int csgn_result_has_verify(const csgn_result* r);
CSGN_API double csgn_result_verify_gap(const csgn_result* r, int side);
CSGN_API int csgn_result_verify_pass(const csgn_result* r);

/* Trace of values at the initial state: iteration, exact values as text. */
CSGN_API size_t csgn_result_trace_length(const csgn_result* r);
CSGN_API size_t csgn_result_trace_iteration(const csgn_result* r, size_t index);
CSGN_API const char* csgn_result_trace_value(const csgn_result* r, size_t index, int side);

/* Strategy profile as JSON, or NULL when none was synthesised. */
CSGN_API const char* csgn_result_strategy_json(const csgn_result* r);
/* Whole result record as JSON. */
CSGN_API const char* csgn_result_json(const csgn_result* r);

/* ---- normal-form games ------------------------------------------------ */

/* Solves a bimatrix game given row-major payoff entries as decimal or
 * fraction strings. Returns JSON with every extreme equilibrium and the
 * selected social-welfare optimal one. */
CSGN_API csgn_status csgn_solve_nfg(size_t rows, size_t cols, const char* const* z1, const char* const* z2,
                                    int eliminate_dominated, char** json_out);

#ifdef __cplusplus
}
#endif

#endif
