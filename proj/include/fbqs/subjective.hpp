#pragma once

#include <map>

#include "fbqs/quorum.hpp"

namespace fbqs {

// Per-server views of a federated structure. Views exist for correct servers
// only; faulty servers' views are immaterial and querying them is an error.
// The agreement invariant (all views assign the same slices to every correct
// server) is reported by validate_agreement rather than enforced here, so
// broken families can be constructed and diagnosed.
class SubjectiveFbqs {
  public:
    SubjectiveFbqs(NodeSet universe, FailureScenario scenario, std::map<NodeId, Fbqs> views);

    // Builds agreeing views from shared slices plus per-viewer overrides for
    // faulty servers' slices. Overrides may only name correct viewers and
    // faulty targets.
    static SubjectiveFbqs
    from_overrides(NodeSet universe, FailureScenario scenario,
                   const std::map<NodeId, std::vector<NodeSet>>& base_slices,
                   const std::map<NodeId, std::map<NodeId, std::vector<NodeSet>>>& view_overrides);

    const NodeSet& universe() const { return universe_; }
    const FailureScenario& scenario() const { return scenario_; }
    NodeSet ok() const { return universe_ - scenario_.bad; }
    NodeSet bad() const { return scenario_.bad; }

    const Fbqs& view(NodeId v) const;
    const std::map<NodeId, Fbqs>& views() const { return views_; }

    bool operator==(const SubjectiveFbqs&) const = default;

  private:
    NodeSet universe_;
    FailureScenario scenario_;
    std::map<NodeId, Fbqs> views_;
};

struct SubjectiveQuorumSystem {
    std::map<NodeId, QuorumSystem> per_view;

    bool operator==(const SubjectiveQuorumSystem&) const = default;
};

struct SubjectiveDqs {
    NodeSet universe;
    FailureScenario scenario;
    SubjectiveQuorumSystem per_view_quorums;
    std::map<NodeId, FailProneSystem> per_view_fail_prone;

    NodeSet ok() const { return universe - scenario.bad; }
    bool operator==(const SubjectiveDqs&) const = default;
};

// Pass iff all views assign the same slices to every correct server; on
// failure the witness carries (viewer, viewer, disputed server).
AxiomReport validate_agreement(const SubjectiveFbqs& sfbqs);

// True iff every correct server's view has quorum intersection.
bool subjective_quorum_intersection(const SubjectiveFbqs& sfbqs,
                                    std::size_t cap = kDefaultEnumerationCap);

SubjectiveQuorumSystem induce_subjective_quorums(const SubjectiveFbqs& sfbqs,
                                                 std::size_t cap = kDefaultEnumerationCap);

// The intact set, computed in every view; the per-view results must coincide.
NodeSet subjective_intact_set(const SubjectiveFbqs& sfbqs, std::size_t cap = kDefaultEnumerationCap);

// SD-safety, SD-consistency and SD-availability, plus the strong consistency
// variant (quantified over all fail-prone elements, not only covering ones)
// reported as a separate flag.
AxiomReport check_subjective_dqs(const SubjectiveDqs& sdqs);

// Per-view quorums plus per-view maximal failure sets that leave the view's
// intact set non-empty. The result always passes check_subjective_dqs.
SubjectiveDqs induced_subjective_dqs(const SubjectiveFbqs& sfbqs,
                                     std::size_t cap = kDefaultEnumerationCap);

// v-blocking evaluated in v's own view; v must be correct.
bool subjective_v_blocking(const SubjectiveFbqs& sfbqs, NodeId v, NodeSet b);

} // namespace fbqs
