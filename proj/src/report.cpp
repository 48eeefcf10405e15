#include "fbqs/report.hpp"

namespace fbqs {

std::string AxiomCheck::format(const std::vector<std::string>& names) const
{
    std::string out = name;
    out += pass ? "\tpass" : "\tfail";
    if (!witness_sets.empty() || !witness_nodes.empty()) {
        out += "\twitness=";
        bool first = true;
        for (const NodeSet& s : witness_sets) {
            if (!first)
                out += " ";
            first = false;
            out += s.to_string(names);
        }
        for (NodeId v : witness_nodes) {
            if (!first)
                out += " ";
            first = false;
            out += NodeSet::node_name(v, names);
        }
    }
    if (!note.empty())
        out += "\t" + note;
    return out;
}

bool AxiomReport::all_pass() const
{
    for (const AxiomCheck& c : checks)
        if (!c.pass)
            return false;
    return true;
}

const AxiomCheck* AxiomReport::find(std::string_view name) const
{
    for (const AxiomCheck& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::string AxiomReport::to_string(const std::vector<std::string>& names) const
{
    std::string out;
    for (const AxiomCheck& c : checks) {
        out += "axiom\t" + c.format(names) + "\n";
    }
    return out;
}

} // namespace fbqs
