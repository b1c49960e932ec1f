#ifndef OPTOKERR_APP_WORKFLOWS_HPP
#define OPTOKERR_APP_WORKFLOWS_HPP

#include "config.hpp"
#include "output.hpp"

namespace okerr::app {

/*
 * Each workflow returns its files and a short stdout summary. Bad or missing
 * config blocks throw InputError; solver failures throw NumericalError.
 */
OutputSet verify_averaging(const RunConfig& rc);
OutputSet run_dynamics(const RunConfig& rc);
OutputSet steady_sweep(const RunConfig& rc, int threads);
OutputSet run_cat(const RunConfig& rc, int threads);

OutputSet run_workflow(Workflow w, const RunConfig& rc, int threads);

/// Reference averaged terms in the number basis: first order, then second order.
sym::NumberPolynomial reference_first_order();
sym::NumberPolynomial reference_second_order();

}  // namespace okerr::app

#endif
