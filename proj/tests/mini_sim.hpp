#pragma once

// Independent interleaving enumerator for tiny scriptless scenarios: plain
// recursion over every delivery order, no eager receives, no deduplication
// tricks beyond memoizing full states. Used as an oracle for explore().

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fbqs/scenario.hpp"

namespace fbqs::test {

struct MiniSim {
    const ProtocolVariant& variant;
    NodeSet correct;
    std::set<std::string> terminal_patterns;
    std::set<std::string> seen;

    std::string pattern(const std::map<NodeId, ServerState>& servers) const
    {
        std::string p;
        for (const auto& [me, s] : servers) {
            p += std::to_string(me) + "=";
            p += s.delivered_value ? *s.delivered_value : Value("-");
            p += ";";
        }
        return p;
    }

    std::string fingerprint(const std::map<NodeId, ServerState>& servers,
                            const std::multiset<std::string>& queue) const
    {
        std::string f;
        for (const auto& [me, s] : servers) {
            f += std::to_string(me);
            f += char('0' + (s.echoed | s.ready << 1 | s.delivered << 2));
            f += s.delivered_value ? *s.delivered_value : Value("-");
            for (const auto& [v, set] : s.echo_senders)
                f += "e" + v + std::to_string(set.bits());
            for (const auto& [v, set] : s.ready_senders)
                f += "r" + v + std::to_string(set.bits());
            f += "|";
        }
        for (const std::string& q : queue)
            f += q + "/";
        return f;
    }

    void explore_all(std::map<NodeId, ServerState> servers,
                     std::vector<std::tuple<NodeId, NodeId, Message>> queue)
    {
        std::multiset<std::string> qkeys;
        for (const auto& [src, dst, msg] : queue)
            qkeys.insert(std::to_string(src) + ">" + std::to_string(dst) + ":" +
                         to_string(msg.kind) + ":" + msg.value);
        if (!seen.insert(fingerprint(servers, qkeys)).second)
            return;
        if (queue.empty()) {
            terminal_patterns.insert(pattern(servers));
            return;
        }
        for (std::size_t i = 0; i < queue.size(); ++i) {
            auto next_servers = servers;
            auto next_queue = queue;
            auto [src, dst, msg] = next_queue[i];
            next_queue.erase(next_queue.begin() + static_cast<std::ptrdiff_t>(i));
            if (correct.contains(dst)) {
                auto [s2, out] = handle(next_servers.at(dst), variant, msg);
                next_servers.at(dst) = s2;
                for (const auto& [d, m] : out.outbound)
                    next_queue.emplace_back(dst, d, m);
            }
            explore_all(std::move(next_servers), std::move(next_queue));
        }
    }
};

inline std::set<std::string> oracle_patterns(const Scenario& scn)
{
    ProtocolVariant variant = resolve_variant(scn);
    MiniSim mini{variant, scn.correct(), {}, {}};
    std::map<NodeId, ServerState> servers;
    for (NodeId v : scn.correct()) {
        ServerState s;
        s.me = v;
        servers.emplace(v, s);
    }
    std::vector<std::tuple<NodeId, NodeId, Message>> queue;
    if (scn.client.correct) {
        for (const auto& [dst, msg] : client_broadcast(scn.client.value, scn.universe))
            queue.emplace_back(kClientId, dst, msg);
    } else {
        for (const auto& [dst, value] : scn.client.split)
            queue.emplace_back(kClientId, dst, Message{MsgKind::Bcast, value, kClientId});
    }
    mini.explore_all(std::move(servers), std::move(queue));
    return mini.terminal_patterns;
}

} // namespace fbqs::test
