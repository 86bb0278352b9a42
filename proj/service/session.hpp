#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dchier/simulation.hpp"

namespace dchier::service {

inline constexpr int kProtocolVersion = 1;
/// Server-side force cap, newtons.
inline constexpr double kForceCap = 30.0;

using ClientId = std::uint64_t;
enum class Role { Driver, Viewer };
std::string_view to_string(Role role);

/// Driver slot bookkeeping: the first client drives, the earliest viewer
/// takes over when the driver leaves.
class SessionRegistry {
 public:
  Role join(ClientId id);
  /// Returns the newly promoted driver, if any.
  std::optional<ClientId> leave(ClientId id);
  /// True when `id` holds or obtains the driver slot.
  bool claim_driver(ClientId id);
  std::optional<ClientId> driver() const { return driver_; }
  std::optional<Role> role(ClientId id) const;
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<ClientId> order_;  // join order
  std::optional<ClientId> driver_;
};

/// Scales f down onto the cap ball.
Vec3 cap_force(const Vec3& f, double cap = kForceCap);

struct ConfigUpdate {
  std::optional<Backend> solver;
  std::vector<std::pair<std::size_t, double>> theta_deg;
  std::optional<nlohmann::json> admittance;
};

struct ClientMessage {
  enum class Kind { Force, Config, Hello, Invalid } kind = Kind::Invalid;
  Vec3 force = Vec3::Zero();
  ConfigUpdate config;
  std::optional<Role> requested_role;
  std::string error;
};

ClientMessage parse_client_message(std::string_view text);

nlohmann::json hello_frame(ClientId id, Role role, const Scenario& scenario, Backend backend);
nlohmann::json state_frame(const TraceRow& row, Backend backend);
nlohmann::json error_frame(const std::string& message);

/// Applies a config update to a running simulation; throws on bad values.
void apply_config(Simulation& sim, const ConfigUpdate& update);

struct Outgoing {
  std::optional<ClientId> to;  // broadcast when empty
  std::string text;
};

/// Everything the sim loop does, without sockets or clocks. Events are
/// handled strictly in arrival order.
class LoopCore {
 public:
  LoopCore(Scenario scenario, Backend backend);

  std::vector<Outgoing> on_join(ClientId id);
  std::vector<Outgoing> on_leave(ClientId id);
  std::vector<Outgoing> on_message(ClientId id, std::string_view text);
  /// Advances the simulation one tick with the latest driver force and
  /// returns the state frame to broadcast.
  Outgoing tick();

  const Simulation& simulation() const { return sim_; }
  const SessionRegistry& registry() const { return registry_; }
  const Vec3& pending_force() const { return force_; }

 private:
  Simulation sim_;
  SessionRegistry registry_;
  Vec3 force_ = Vec3::Zero();
};

}  // namespace dchier::service
