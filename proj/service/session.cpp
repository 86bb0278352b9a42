#include "session.hpp"

#include <algorithm>
#include <cmath>

namespace dchier::service {

using nlohmann::json;

std::string_view to_string(Role role) { return role == Role::Driver ? "driver" : "viewer"; }

Role SessionRegistry::join(ClientId id) {
  if (std::find(order_.begin(), order_.end(), id) != order_.end())
    return *role(id);
  order_.push_back(id);
  if (!driver_) driver_ = id;
  return driver_ == id ? Role::Driver : Role::Viewer;
}

std::optional<ClientId> SessionRegistry::leave(ClientId id) {
  const auto it = std::find(order_.begin(), order_.end(), id);
  if (it == order_.end()) return std::nullopt;
  order_.erase(it);
  if (driver_ != id) return std::nullopt;
  driver_.reset();
  if (!order_.empty()) driver_ = order_.front();
  return driver_;
}

bool SessionRegistry::claim_driver(ClientId id) {
  if (!role(id)) return false;
  if (!driver_) driver_ = id;
  return driver_ == id;
}

std::optional<Role> SessionRegistry::role(ClientId id) const {
  if (std::find(order_.begin(), order_.end(), id) == order_.end()) return std::nullopt;
  return driver_ == id ? Role::Driver : Role::Viewer;
}

Vec3 cap_force(const Vec3& f, double cap) {
  const double mag = f.norm();
  return mag > cap ? Vec3(f * (cap / mag)) : f;
}

namespace {

ClientMessage invalid(std::string why) {
  ClientMessage m;
  m.kind = ClientMessage::Kind::Invalid;
  m.error = std::move(why);
  return m;
}

}  // namespace

ClientMessage parse_client_message(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return invalid("malformed JSON");
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string())
    return invalid("message needs a string 'type'");
  const std::string type = doc.at("type").get<std::string>();
  ClientMessage m;
  if (type == "force") {
    if (!doc.contains("f") || !doc.at("f").is_array() || doc.at("f").size() > 3 || doc.at("f").empty())
      return invalid("force needs f: [fx, fy, fz]");
    for (std::size_t i = 0; i < doc.at("f").size(); ++i) {
      const json& v = doc.at("f")[i];
      if (!v.is_number() || !std::isfinite(v.get<double>())) return invalid("force entries must be finite numbers");
      m.force(static_cast<Index>(i)) = v.get<double>();
    }
    m.force = cap_force(m.force);
    m.kind = ClientMessage::Kind::Force;
    return m;
  }
  if (type == "config") {
    if (doc.contains("solver")) {
      if (!doc.at("solver").is_string()) return invalid("solver must be a string");
      m.config.solver = parse_backend(doc.at("solver").get<std::string>());
      if (!m.config.solver) return invalid("unknown solver (expected " + std::string(kBackendNames) + ")");
    }
    if (doc.contains("theta_deg")) {
      const json& t = doc.at("theta_deg");
      if (t.is_array()) {
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (t[i].is_null()) continue;
          if (!t[i].is_number()) return invalid("theta_deg entries must be numbers");
          m.config.theta_deg.emplace_back(i, t[i].get<double>());
        }
      } else if (t.is_object()) {
        for (const auto& [k, v] : t.items()) {
          if (!v.is_number()) return invalid("theta_deg entries must be numbers");
          try {
            m.config.theta_deg.emplace_back(std::stoul(k), v.get<double>());
          } catch (const std::exception&) {
            return invalid("theta_deg keys are level indices");
          }
        }
      } else {
        return invalid("theta_deg must be an array or an object");
      }
    }
    if (doc.contains("admittance")) {
      if (!doc.at("admittance").is_object()) return invalid("admittance must be an object");
      m.config.admittance = doc.at("admittance");
    }
    m.kind = ClientMessage::Kind::Config;
    return m;
  }
  if (type == "hello") {
    m.kind = ClientMessage::Kind::Hello;
    if (doc.contains("role")) {
      const json& r = doc.at("role");
      if (r == "driver") {
        m.requested_role = Role::Driver;
      } else if (r == "viewer") {
        m.requested_role = Role::Viewer;
      } else {
        return invalid("role must be 'driver' or 'viewer'");
      }
    }
    return m;
  }
  return invalid("unsupported message type '" + type + "'");
}

json hello_frame(ClientId id, Role role, const Scenario& scenario, Backend backend) {
  return {{"type", "hello"},
          {"version", kProtocolVersion},
          {"client", id},
          {"role", std::string(to_string(role))},
          {"solver", std::string(to_string(backend))},
          {"force_cap", kForceCap},
          {"dt", scenario.dt},
          {"scenario", to_json(scenario)}};
}

json state_frame(const TraceRow& row, Backend backend) {
  auto v3 = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  json q = json::array();
  for (Index i = 0; i < row.q.size(); ++i) q.push_back(row.q(i));
  return {{"type", "state"},
          {"t", row.t},
          {"q", q},
          {"x", v3(row.x)},
          {"v", v3(row.v)},
          {"v_a", v3(row.v_a)},
          {"f", v3(row.f)},
          {"angle_dev_deg", row.angle_dev_deg},
          {"theta_deg", row.theta_deg},
          {"eta", row.eta},
          {"s", row.s},
          {"blocked", row.blocked},
          {"sat_rows", row.sat_rows},
          {"status", std::string(to_string(row.status))},
          {"solver", std::string(to_string(backend))}};
}

json error_frame(const std::string& message) { return {{"type", "error"}, {"message", message}}; }

void apply_config(Simulation& sim, const ConfigUpdate& update) {
  // Validate everything before touching the simulation.
  for (const auto& [level, deg] : update.theta_deg) {
    if (level >= sim.scenario().levels.size()) throw InvalidInput("theta_deg: no level " + std::to_string(level));
    if (!(deg >= 0.0 && deg <= 180.0)) throw InvalidInput("theta_deg: values lie in [0, 180]");
  }
  std::optional<AdmittanceParams> adm;
  if (update.admittance) {
    json doc = to_json(sim.scenario());
    for (const auto& [k, v] : update.admittance->items()) doc["admittance"][k] = v;
    adm = parse_scenario(doc).admittance;
  }
  if (update.solver) sim.set_backend(*update.solver);
  for (const auto& [level, deg] : update.theta_deg) sim.set_theta_deg(level, deg);
  if (adm) sim.set_admittance(*adm);
}

LoopCore::LoopCore(Scenario scenario, Backend backend) : sim_(std::move(scenario), backend) {}

std::vector<Outgoing> LoopCore::on_join(ClientId id) {
  const Role role = registry_.join(id);
  return {{id, hello_frame(id, role, sim_.scenario(), sim_.backend()).dump()}};
}

std::vector<Outgoing> LoopCore::on_leave(ClientId id) {
  const bool was_driver = registry_.driver() == id;
  const auto promoted = registry_.leave(id);
  std::vector<Outgoing> out;
  if (was_driver) force_.setZero();
  if (promoted) out.push_back({*promoted, hello_frame(*promoted, Role::Driver, sim_.scenario(), sim_.backend()).dump()});
  return out;
}

std::vector<Outgoing> LoopCore::on_message(ClientId id, std::string_view text) {
  const ClientMessage m = parse_client_message(text);
  const auto role = registry_.role(id);
  if (!role) return {};
  auto reject = [&](const std::string& why) { return std::vector<Outgoing>{{id, error_frame(why).dump()}}; };
  switch (m.kind) {
    case ClientMessage::Kind::Invalid:
      return reject(m.error);
    case ClientMessage::Kind::Hello:
      if (m.requested_role == Role::Driver && !registry_.claim_driver(id))
        return reject("driver role is held by another client");
      return {{id, hello_frame(id, *registry_.role(id), sim_.scenario(), sim_.backend()).dump()}};
    case ClientMessage::Kind::Force:
      if (*role != Role::Driver) return reject("only the driver may send force");
      force_ = m.force;
      return {};
    case ClientMessage::Kind::Config:
      if (*role != Role::Driver) return reject("only the driver may send config");
      try {
        apply_config(sim_, m.config);
      } catch (const std::exception& e) {
        return reject(std::string("config rejected: ") + e.what());
      }
      return {};
  }
  return {};
}

Outgoing LoopCore::tick() {
  const TraceRow& row = sim_.step(force_);
  return {std::nullopt, state_frame(row, sim_.backend()).dump()};
}

}  // namespace dchier::service
