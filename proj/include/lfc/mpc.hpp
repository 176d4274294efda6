#pragma once
// Receding-horizon control: the centralized network controller, the
// frozen-tie decentralized baseline, the plug-in controller contract with a
// name registry, and the sparse multi-stage program they are built on.

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lfc/dynamics.hpp"
#include "lfc/model.hpp"
#include "lfc/qp.hpp"
#include "lfc/scenario.hpp"
#include "lfc/topology.hpp"

namespace lfc {

struct MpcConfig {
  int horizon = 30;
  std::array<double, 3> state_weights{100.0, 10.0, 1.0};  // d_delta, d_f, e
  std::array<double, 3> input_weights{1.0, 1.0, 1.0};     // d_p_disp, p_c, p_d
  double tol_prim = 1e-6;
  double tol_dual = 1e-6;
  int max_iter = 20000;
  int threads = 1;     // decentralized area solves may run in parallel
  bool warm_start = true;
  void validate() const;
};

/// Exogenous data over the horizon; stage j lives at index j-1.
using ExogenousWindow = std::vector<ExogenousVec>;

/// Window seen at step k: stage 1 carries the measured deviation at k,
/// stage j >= 2 the forecast at k+j-1, holding the final sample once the
/// day runs out.
ExogenousWindow splice_exogenous(int k, const StepSignals& signals, int horizon);

struct StepDiagnostics {
  double open_loop_cost = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  bool softened = false;
  QpStatus status = QpStatus::optimal;
};

struct Plan {
  std::vector<NetworkInput> inputs;  // u(0..N-1)
};

class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string_view name() const = 0;
  virtual int horizon() const = 0;
  /// Full input decision for step k. The window must have horizon() stages.
  virtual NetworkInput observe(int k, const NetworkState& state, const ExogenousWindow& window,
                               StepDiagnostics& diag) = 0;
  /// Most recent full open-loop plan, or nullptr when not applicable.
  virtual const Plan* last_plan() const { return nullptr; }
  /// Plant variants this controller can drive.
  virtual bool supports(ModelVariant v) const { return v != ModelVariant::turbine; }
};

struct ControllerContext {
  const Topology* topology = nullptr;
  NetworkParams params;  // capacities already applied
  MpcConfig config;
};

/// The sparse stacked program for one observation: decision vector
/// [x(1..N); u(0..N-1)], diagonal cost 2*diag(R..,Q..), one equality block
/// per stage tying x(j) to x(j-1), u(j-1) and the spliced exogenous data,
/// and the operating boxes on every variable.
QuadraticProgram build_mpc_qp(const NetworkState& x_k, const ExogenousWindow& window,
                              const Topology& topo, const NetworkParams& params,
                              const MpcConfig& cfg);

/// Cost of rolling a plan forward under the coupled network model with the
/// given window, summing stage costs x(j)'Rx(j) + u(j-1)'Qu(j-1).
double evaluate_plan(const NetworkState& x_k, const Plan& plan, const ExogenousWindow& window,
                     const Topology& topo, const NetworkParams& params, const MpcConfig& cfg);

/// Centralized receding-horizon controller over the coupled network. The
/// stacked program is assembled once; each observation updates the stage
/// right-hand sides, warm starts from the shifted previous solution, and
/// falls back to a slack-softened copy of the state boxes when the hard
/// program is infeasible. Input boxes are never softened.
class CentralizedMpc : public Controller {
 public:
  explicit CentralizedMpc(const ControllerContext& ctx);
  ~CentralizedMpc() override;
  std::string_view name() const override { return "centralized"; }
  int horizon() const override;
  NetworkInput observe(int k, const NetworkState& state, const ExogenousWindow& window,
                       StepDiagnostics& diag) override;
  const Plan* last_plan() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Decentralized baseline: one local program per area with the tie-line
/// power frozen at its measured value over the whole horizon. Areas are
/// independent, so the gather order is fixed by area index and the result
/// does not depend on the thread count.
class DecentralizedMpc : public Controller {
 public:
  explicit DecentralizedMpc(const ControllerContext& ctx);
  ~DecentralizedMpc() override;
  std::string_view name() const override { return "decentralized"; }
  int horizon() const override;
  NetworkInput observe(int k, const NetworkState& state, const ExogenousWindow& window,
                       StepDiagnostics& diag) override;
  const Plan* last_plan() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Applies zero input everywhere; compatible with every plant variant.
class ZeroController : public Controller {
 public:
  std::string_view name() const override { return "zero"; }
  int horizon() const override { return 1; }
  NetworkInput observe(int, const NetworkState&, const ExogenousWindow&, StepDiagnostics&) override {
    return NetworkInput{};
  }
  bool supports(ModelVariant) const override { return true; }
};

struct UnknownControllerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ControllerFactory = std::function<std::unique_ptr<Controller>(const ControllerContext&)>;

/// Adds or replaces a factory under the given name.
void register_controller(const std::string& name, ControllerFactory factory);
std::vector<std::string> registered_controllers();
/// Throws UnknownControllerError listing the registered names.
std::unique_ptr<Controller> make_controller(std::string_view name, const ControllerContext& ctx);

}  // namespace lfc
