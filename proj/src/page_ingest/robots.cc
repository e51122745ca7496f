#include <algorithm>
#include <cctype>
#include <sstream>
#include <thread>
#include <vector>

#include "censorsearch/page_ingest/page.h"

namespace censorsearch {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Group {
  std::vector<std::string> agents;
  std::vector<std::pair<std::string, bool>> rules;
};

}  // namespace

void HostRateLimiter::acquire(const std::string& host) {
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    auto& next = next_slot_[host];
    slot = std::max(now, next);
    next = slot + std::chrono::duration_cast<Clock::duration>(delay_);
  }
  std::this_thread::sleep_until(slot);
}

RobotsRules RobotsRules::parse(std::string_view robots_txt, std::string_view user_agent) {
  std::vector<Group> groups;
  bool last_was_agent = false;
  std::istringstream in{std::string(robots_txt)};
  for (std::string raw; std::getline(in, raw);) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = lower(trim(line.substr(0, colon)));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent) groups.emplace_back();
      groups.back().agents.push_back(lower(value));
      last_was_agent = true;
    } else if (key == "allow" || key == "disallow") {
      last_was_agent = false;
      if (groups.empty() || value.empty()) continue;
      groups.back().rules.emplace_back(std::string(value), key == "allow");
    } else {
      last_was_agent = false;
    }
  }

  std::string token = lower(user_agent.substr(0, user_agent.find('/')));
  auto matches = [&](const std::string& agent) { return agent == token; };
  bool specific = std::any_of(groups.begin(), groups.end(), [&](const Group& g) {
    return std::any_of(g.agents.begin(), g.agents.end(), matches);
  });

  RobotsRules out;
  for (const auto& group : groups) {
    const bool applies = std::any_of(
        group.agents.begin(), group.agents.end(), [&](const std::string& a) {
          return specific ? matches(a) : a == "*";
        });
    if (!applies) continue;
    for (const auto& [prefix, allow] : group.rules) {
      auto [it, inserted] = out.rules_.emplace(prefix, allow);
      if (!inserted) it->second = it->second || allow;
    }
  }
  return out;
}

bool RobotsRules::allowed(std::string_view path) const {
  std::size_t best_len = 0;
  bool verdict = true;
  for (const auto& [prefix, allow] : rules_) {
    if (path.starts_with(prefix) && prefix.size() >= best_len) {
      if (prefix.size() > best_len || allow) verdict = allow;
      best_len = prefix.size();
    }
  }
  return verdict;
}

}  // namespace censorsearch
