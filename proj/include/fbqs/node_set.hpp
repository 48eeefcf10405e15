#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "fbqs/errors.hpp"

namespace fbqs {

using NodeId = std::uint32_t;

// Reserved sender id for the broadcasting client; never a member of a NodeSet.
inline constexpr NodeId kClientId = 0xffffffffu;

// A finite set of server ids, backed by a 64-bit mask. The bit order gives a
// total order over sets, so containers of NodeSets iterate deterministically.
class NodeSet {
  public:
    constexpr NodeSet() = default;

    static NodeSet of(std::initializer_list<NodeId> ids)
    {
        NodeSet s;
        for (NodeId v : ids)
            s.add(v);
        return s;
    }

    static constexpr NodeSet from_bits(std::uint64_t bits)
    {
        NodeSet s;
        s.bits_ = bits;
        return s;
    }

    // {0, 1, ..., n-1}
    static NodeSet full(std::size_t n)
    {
        if (n > 64)
            throw DomainError("node universe exceeds 64 nodes");
        return from_bits(n == 64 ? ~0ull : (1ull << n) - 1);
    }

    NodeSet& add(NodeId v)
    {
        bits_ |= bit(v);
        return *this;
    }

    NodeSet& remove(NodeId v)
    {
        bits_ &= ~bit(v);
        return *this;
    }

    bool contains(NodeId v) const { return v < 64 && (bits_ & (1ull << v)) != 0; }
    bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }

    bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }
    bool intersects(NodeSet o) const { return (bits_ & o.bits_) != 0; }

    friend NodeSet operator|(NodeSet a, NodeSet b) { return from_bits(a.bits_ | b.bits_); }
    friend NodeSet operator&(NodeSet a, NodeSet b) { return from_bits(a.bits_ & b.bits_); }
    friend NodeSet operator-(NodeSet a, NodeSet b) { return from_bits(a.bits_ & ~b.bits_); }

    NodeSet& operator|=(NodeSet o)
    {
        bits_ |= o.bits_;
        return *this;
    }

    NodeSet& operator&=(NodeSet o)
    {
        bits_ &= o.bits_;
        return *this;
    }

    bool operator==(const NodeSet&) const = default;
    auto operator<=>(const NodeSet&) const = default;

    std::uint64_t bits() const { return bits_; }

    // Iterates members in ascending id order.
    class iterator {
      public:
        using value_type = NodeId;
        explicit iterator(std::uint64_t rest) : rest_(rest) {}
        NodeId operator*() const { return static_cast<NodeId>(std::countr_zero(rest_)); }
        iterator& operator++()
        {
            rest_ &= rest_ - 1;
            return *this;
        }
        bool operator!=(const iterator& o) const { return rest_ != o.rest_; }
        bool operator==(const iterator& o) const { return rest_ == o.rest_; }

      private:
        std::uint64_t rest_;
    };

    iterator begin() const { return iterator(bits_); }
    iterator end() const { return iterator(0); }

    std::vector<NodeId> members() const
    {
        std::vector<NodeId> out;
        for (NodeId v : *this)
            out.push_back(v);
        return out;
    }

    std::string to_string(const std::vector<std::string>& names = {}) const
    {
        std::string out = "{";
        bool first = true;
        for (NodeId v : *this) {
            if (!first)
                out += ",";
            first = false;
            out += node_name(v, names);
        }
        out += "}";
        return out;
    }

    static std::string node_name(NodeId v, const std::vector<std::string>& names)
    {
        if (v == kClientId)
            return "client";
        if (v < names.size())
            return names[v];
        return std::to_string(v);
    }

  private:
    static std::uint64_t bit(NodeId v)
    {
        if (v >= 64)
            throw DomainError("node id " + std::to_string(v) + " out of range (max 63)");
        return 1ull << v;
    }

    std::uint64_t bits_ = 0;
};

// Calls fn(NodeSet) for every subset of mask, in ascending bit-value order,
// starting with the empty set.
template <typename Fn>
void for_each_subset(NodeSet mask, Fn&& fn)
{
    const std::uint64_t m = mask.bits();
    std::uint64_t sub = 0;
    while (true) {
        fn(NodeSet::from_bits(sub));
        if (sub == m)
            break;
        sub = (sub - m) & m;
    }
}

} // namespace fbqs
