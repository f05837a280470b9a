"""Knowledge-assisted privacy-preserving semantic communication simulator.

Two parties fuse their personal knowledge graphs, carve out a private
subgraph for each message, and send sensitive entities through a keyed
private codebook while everything else uses a public one. Eavesdroppers of
increasing capability try to read the tapped frames.
"""

from .adversary import (
    A_BITS,
    B_GLOBAL,
    C_PERSONAL,
    EavesdropperProfile,
    LeakageReport,
    attack_bits,
    attack_global,
    attack_personal,
    run_attack,
    score_leakage,
)
from .channel import ChannelConfig, transmit
from .codebook import Codebook, build_global_codebook, build_private_codebook, check_disjoint, keyed_permutation
from .codec import (
    BitFrame,
    InferredFact,
    SensitivityReport,
    Token,
    TokenStream,
    align_and_overlay,
    decode_tokens,
    disaggregate,
    encode_tokens,
    infer_semantics,
    recognize_sensitive,
    repair_missing,
    tokenize,
)
from .estimators import DecodedMessage, KnowledgeBase, SemanticDecoder, SemanticEncoder
from .exceptions import *  # noqa: F401,F403
from .harness import (
    ScenarioConfig,
    Scenario,
    TrialTranscript,
    load_scenario,
    parse_scenario,
    run_batch,
    run_trial,
)
from .kg import (
    Entity,
    KnowledgeGraph,
    Triple,
    bfs_distances,
    connected_components,
    context_signature,
    multiset_jaccard,
    neighbors,
    random_walk_collect,
    shortest_path,
    steiner_subgraph,
    steiner_tree_nodes,
)
from .kgio import read_delta, read_graph, write_graph
from .knowledge import (
    AccessCredential,
    Decision,
    PrivateKnowledgeStore,
    SharedSecret,
    UpdateDelta,
    analyze_message,
    apply_update,
    apply_updates,
    construct_private_knowledge,
    disambiguate,
    distribute,
    fuse,
    issue_credential,
    psi_exchange,
    psi_intersect,
)

__version__ = "0.1.0"


def fixture_scenario_path():
    """Path of the bundled example scenario."""
    from pathlib import Path

    return Path(__file__).parent / "data" / "fixture" / "scenario.cfg"
