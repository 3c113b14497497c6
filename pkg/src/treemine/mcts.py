"""Retrieval-augmented Monte Carlo Tree Search over math problems.

Each node is a reasoning state; edges apply one of four actions:

* OST - propose a single chain-of-thought step (terminal when the step
  contains a boxed final answer),
* CRS - complete the remaining solution in one shot (always terminal),
* QG  - generate a retrieval query (a hypothetical theorem statement),
* RT  - retrieve theorems for the parent QG query; each retrieved
  theorem is kept only when self-reflection labels it relevant, and is
  then summarized into natural language before it enters the context.

Reflection-rejected theorems are recorded in the tree's hard-negative
ledger together with the QG node that produced the query.

Selection uses UCT: Q/N + c * sqrt(ln(N_parent) / N), with unvisited
children at +infinity. A rollout is select -> expand -> simulate ->
reward -> backpropagate; rewards are 1 when the terminal's boxed answer
verifies against the gold answer, else 0, and both Q and N accumulate
along the root-to-terminal path.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable

from .corpus import Corpus, MathProblem, TheoremDoc
from .llm import (
    BackendError,
    DecodingParams,
    GenBackend,
    extract_boxed_answer,
    generate,
    parse_relevance,
    render_prompt,
    verify_answer,
)
from .retrieval import RetrievalHit
from .seeds import derive_seed

logger = logging.getLogger(__name__)

__all__ = [
    "ActionKind",
    "TreeNode",
    "LedgerEntry",
    "SearchTree",
    "MctsConfig",
    "TheoremRetriever",
    "SearchAborted",
    "uct_score",
    "select",
    "legal_actions",
    "expand",
    "simulate",
    "reward",
    "backpropagate",
    "run_search",
    "dump_tree",
    "tree_to_dict",
    "tree_from_dict",
    "load_tree",
    "check_tree_invariants",
]


class ActionKind(str, Enum):
    OST = "OST"
    CRS = "CRS"
    QG = "QG"
    RT = "RT"


@dataclass
class TreeNode:
    """One search-tree node; ``action`` is None only at the root."""

    node_id: int
    parent: int | None
    action: ActionKind | None
    content: str
    depth: int
    theorem_id: str | None = None
    q_value: float = 0.0
    visit_count: int = 0
    terminal: bool = False
    reward: float | None = None
    children: list[int] = field(default_factory=list)


@dataclass
class LedgerEntry:
    """A reflection-rejected theorem: the raw material for hard negatives."""

    qg_node_id: int
    theorem_id: str
    reason: str


class SearchAborted(RuntimeError):
    """Search gave up after repeated consecutive rollout failures."""


@dataclass
class MctsConfig:
    """Search parameters; defaults follow the standard configuration
    (16 rollouts, depth 6, c=2, top-5 retrieval, 2 OST / 1 QG children)."""

    rollouts: int = 16
    max_depth: int = 6
    exploration_c: float = 2.0
    rt_top_k: int = 5
    ost_children: int = 2
    qg_children: int = 1
    decoding: DecodingParams = field(default_factory=DecodingParams)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rollouts < 1:
            raise ValueError("rollouts must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.rt_top_k < 1:
            raise ValueError("rt_top_k must be >= 1")


class SearchTree:
    """Arena of nodes plus the hard-negative ledger for one problem."""

    def __init__(self, problem: MathProblem, rng_seed: int):
        self.problem = problem
        self.rng_seed = rng_seed
        self.nodes: list[TreeNode] = [
            TreeNode(node_id=0, parent=None, action=None, content=problem.question, depth=0)
        ]
        self.root = 0
        self.ledger: list[LedgerEntry] = []
        self.completed_rollouts = 0
        self._gen_counter = 0

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def add_node(
        self,
        parent_id: int,
        action: ActionKind,
        content: str,
        terminal: bool = False,
        theorem_id: str | None = None,
    ) -> TreeNode:
        parent = self.nodes[parent_id]
        node = TreeNode(
            node_id=len(self.nodes),
            parent=parent_id,
            action=action,
            content=content,
            depth=parent.depth + 1,
            terminal=terminal,
            theorem_id=theorem_id,
        )
        self.nodes.append(node)
        parent.children.append(node.node_id)
        return node

    def path_to_root(self, node_id: int) -> list[TreeNode]:
        """Nodes from the root down to ``node_id``, inclusive."""
        path: list[TreeNode] = []
        current: int | None = node_id
        while current is not None:
            node = self.nodes[current]
            path.append(node)
            current = node.parent
        path.reverse()
        return path

    def steps_before(self, node_id: int) -> list[str]:
        """Contents of non-root ancestors strictly above ``node_id``."""
        return [n.content for n in self.path_to_root(node_id)[1:-1]]

    def next_gen_seed(self) -> int:
        self._gen_counter += 1
        return derive_seed(self.rng_seed, f"gen:{self._gen_counter}")

    def terminals(self) -> list[TreeNode]:
        return [n for n in self.nodes if n.terminal]


@dataclass
class TheoremRetriever:
    """What the search engine needs from a retriever: ranked hits plus
    access to the document payloads behind them."""

    corpus: Corpus
    search_fn: Callable[[str, int], list[RetrievalHit]]
    retriever_id: str = "custom"

    def search(self, query: str, k: int) -> list[RetrievalHit]:
        return self.search_fn(query, k)

    def doc(self, doc_id: str) -> TheoremDoc:
        return self.corpus.get(doc_id)


def uct_score(node: TreeNode, parent_visits: int, c: float) -> float:
    """UCT value of a child; unvisited children get +infinity."""
    if node.visit_count == 0:
        return math.inf
    exploit = node.q_value / node.visit_count
    explore = math.sqrt(math.log(max(parent_visits, 1)) / node.visit_count)
    return exploit + c * explore


def select(tree: SearchTree, c: float) -> int:
    """Descend from the root by maximum UCT until a leaf is reached.

    Ties go to the lowest node id.
    """
    current = tree.node(tree.root)
    while current.children:
        best: TreeNode | None = None
        best_score = -math.inf
        for child_id in sorted(current.children):
            child = tree.node(child_id)
            score = uct_score(child, current.visit_count, c)
            if score > best_score:
                best = child
                best_score = score
        assert best is not None
        current = best
    return current.node_id


def legal_actions(node: TreeNode, config: MctsConfig) -> list[ActionKind]:
    """Actions available at a node.

    QG nodes may only be followed by RT. At depth max_depth-1 only CRS
    remains so the next node terminates in bounds. QG is also excluded
    at depth max_depth-2: its forced RT child plus one closing CRS step
    would otherwise overrun the depth budget.
    """
    if node.terminal:
        raise ValueError(f"node {node.node_id} is terminal; it has no legal actions")
    if node.action is ActionKind.QG:
        return [ActionKind.RT]
    if node.depth >= config.max_depth - 1:
        return [ActionKind.CRS]
    if node.depth == config.max_depth - 2:
        return [ActionKind.OST, ActionKind.CRS]
    return [ActionKind.OST, ActionKind.CRS, ActionKind.QG]


def _partial_block(steps: list[str]) -> str:
    """Continuation block appended after the prompt preamble."""
    if not steps:
        return ""
    return "\n" + "\n".join(steps)


def _steps_with_node(tree: SearchTree, node: TreeNode) -> list[str]:
    """Contents of the path from below the root through ``node``."""
    if node.node_id == tree.root:
        return []
    return [n.content for n in tree.path_to_root(node.node_id)[1:]]


def _expand_action(
    tree: SearchTree,
    node: TreeNode,
    action: ActionKind,
    backend: GenBackend,
    retriever: TheoremRetriever,
    config: MctsConfig,
) -> list[int]:
    question = tree.problem.question
    steps = _steps_with_node(tree, node)
    new_ids: list[int] = []

    if action is ActionKind.OST:
        prompt = render_prompt(
            "ost", {"question": question, "partial_solution": _partial_block(steps)}
        )
        for _ in range(config.ost_children):
            params = replace(config.decoding, seed=tree.next_gen_seed())
            content = generate(backend, prompt, params).strip()
            terminal = extract_boxed_answer(content) is not None
            child = tree.add_node(node.node_id, ActionKind.OST, content, terminal=terminal)
            new_ids.append(child.node_id)

    elif action is ActionKind.CRS:
        prompt = render_prompt(
            "crs", {"question": question, "partial_solution": _partial_block(steps)}
        )
        params = replace(config.decoding, seed=tree.next_gen_seed())
        content = generate(backend, prompt, params).strip()
        child = tree.add_node(node.node_id, ActionKind.CRS, content, terminal=True)
        new_ids.append(child.node_id)

    elif action is ActionKind.QG:
        prompt = render_prompt(
            "query_gen",
            {"question": question, "partial_solution": "\n".join(steps)},
        )
        for _ in range(config.qg_children):
            params = replace(config.decoding, seed=tree.next_gen_seed())
            content = generate(backend, prompt, params).strip()
            child = tree.add_node(node.node_id, ActionKind.QG, content)
            new_ids.append(child.node_id)

    elif action is ActionKind.RT:
        if node.action is not ActionKind.QG:
            raise ValueError("RT can only expand a QG node")
        query = node.content
        # Reflection judges against the solution path up to the QG's
        # parent; the generated query itself stays out of the context.
        reflection_steps = tree.steps_before(node.node_id)
        hits = retriever.search(query, config.rt_top_k)
        for hit in hits:
            doc = retriever.doc(hit.doc_id)
            prompt = render_prompt(
                "self_reflection",
                {
                    "question": question,
                    "partial_solution": "\n".join(reflection_steps),
                    "theorem": doc.text,
                },
            )
            params = replace(config.decoding, seed=tree.next_gen_seed())
            verdict = generate(backend, prompt, params)
            relevant, reason = parse_relevance(verdict)
            if relevant:
                summary = _summarize(tree, doc, backend, config)
                child = tree.add_node(
                    node.node_id,
                    ActionKind.RT,
                    summary,
                    theorem_id=doc.id,
                )
                new_ids.append(child.node_id)
            else:
                tree.ledger.append(
                    LedgerEntry(qg_node_id=node.node_id, theorem_id=doc.id, reason=reason)
                )
    else:  # pragma: no cover - exhaustiveness guard
        raise ValueError(f"unknown action {action}")

    return new_ids


def _summarize(
    tree: SearchTree, doc: TheoremDoc, backend: GenBackend, config: MctsConfig
) -> str:
    """Natural-language form of a theorem, cached on the document."""
    if doc.summary is not None:
        return doc.summary
    prompt = render_prompt("self_summarization", {"theorem": doc.text})
    params = replace(config.decoding, seed=tree.next_gen_seed())
    summary = generate(backend, prompt, params).strip()
    doc.summary = summary
    return summary


def expand(
    tree: SearchTree,
    node_id: int,
    backend: GenBackend,
    retriever: TheoremRetriever,
    config: MctsConfig,
) -> list[int]:
    """Add children for every legal action of a non-terminal leaf.

    A QG node whose retrieved theorems are all rejected gains no
    children and is closed off as terminal (it scores reward 0), so
    rollouts cannot get stuck on it.
    """
    node = tree.node(node_id)
    if node.terminal:
        raise ValueError(f"cannot expand terminal node {node_id}")
    if node.children:
        raise ValueError(f"node {node_id} is already expanded")
    new_ids: list[int] = []
    for action in legal_actions(node, config):
        new_ids.extend(_expand_action(tree, node, action, backend, retriever, config))
    if not new_ids and node.action is ActionKind.QG:
        node.terminal = True
    return new_ids


def simulate(
    tree: SearchTree,
    node_id: int,
    backend: GenBackend,
    retriever: TheoremRetriever,
    config: MctsConfig,
    rng: random.Random,
) -> int:
    """Random playout from a node until a terminal is reached.

    Actions are drawn uniformly from the legal set and nodes are
    generated exactly as in expansion; everything generated stays in
    the tree so completed trajectories can be mined later.
    """
    current = tree.node(node_id)
    while True:
        if current.terminal:
            return current.node_id
        actions = legal_actions(current, config)
        action = actions[rng.randrange(len(actions))]
        new_ids = _expand_action(tree, current, action, backend, retriever, config)
        if not new_ids:
            # every retrieved theorem was rejected: close the branch
            current.terminal = True
            return current.node_id
        current = tree.node(new_ids[rng.randrange(len(new_ids))])


def reward(terminal: TreeNode, problem: MathProblem) -> float:
    """1.0 when the terminal's boxed answer verifies against gold, else 0.0."""
    if not terminal.terminal:
        raise ValueError(f"node {terminal.node_id} is not terminal")
    answer = extract_boxed_answer(terminal.content)
    if answer is None:
        return 0.0
    return 1.0 if verify_answer(answer, problem.gold_answer) else 0.0


def backpropagate(tree: SearchTree, terminal_id: int, r: float) -> None:
    """Add the reward to Q and bump N on every node of the root path."""
    for node in tree.path_to_root(terminal_id):
        node.q_value += r
        node.visit_count += 1


def run_search(
    problem: MathProblem,
    backend: GenBackend,
    retriever: TheoremRetriever,
    config: MctsConfig,
) -> SearchTree:
    """Run the configured number of rollouts and return the finished tree.

    A generation failure aborts only the current rollout; three failed
    rollouts in a row abort the whole search.
    """
    tree = SearchTree(problem=problem, rng_seed=config.seed)
    rng = random.Random(derive_seed(config.seed, "simulation"))
    consecutive_failures = 0
    for rollout in range(config.rollouts):
        try:
            leaf_id = select(tree, config.exploration_c)
            leaf = tree.node(leaf_id)
            if leaf.terminal:
                terminal_id = leaf_id
            else:
                children = expand(tree, leaf_id, backend, retriever, config)
                if children:
                    start = children[rng.randrange(len(children))]
                    terminal_id = simulate(tree, start, backend, retriever, config, rng)
                else:
                    terminal_id = leaf_id
            terminal = tree.node(terminal_id)
            r = reward(terminal, problem)
            terminal.reward = r
            backpropagate(tree, terminal_id, r)
            tree.completed_rollouts += 1
            consecutive_failures = 0
        except BackendError as exc:
            consecutive_failures += 1
            logger.warning(
                "problem %s rollout %d failed: %s", problem.id, rollout + 1, exc
            )
            if consecutive_failures >= 3:
                raise SearchAborted(
                    f"problem {problem.id}: 3 consecutive rollout failures"
                ) from exc
    return tree


def tree_to_dict(tree: SearchTree, config: MctsConfig | None = None) -> dict:
    """JSON-ready dump of the tree: nodes, ledger, and configuration."""
    payload: dict = {
        "problem": asdict(tree.problem),
        "rng_seed": tree.rng_seed,
        "completed_rollouts": tree.completed_rollouts,
        "nodes": [
            {
                "node_id": n.node_id,
                "parent": n.parent,
                "action": n.action.value if n.action else None,
                "content": n.content,
                "depth": n.depth,
                "theorem_id": n.theorem_id,
                "q_value": n.q_value,
                "visit_count": n.visit_count,
                "terminal": n.terminal,
                "reward": n.reward,
                "children": list(n.children),
            }
            for n in tree.nodes
        ],
        "ledger": [asdict(entry) for entry in tree.ledger],
    }
    if config is not None:
        payload["config"] = asdict(config)
    return payload


def tree_from_dict(payload: dict) -> SearchTree:
    problem = MathProblem(**payload["problem"])
    tree = SearchTree(problem=problem, rng_seed=payload["rng_seed"])
    tree.completed_rollouts = payload.get("completed_rollouts", 0)
    tree.nodes = []
    for raw in payload["nodes"]:
        node = TreeNode(
            node_id=raw["node_id"],
            parent=raw["parent"],
            action=ActionKind(raw["action"]) if raw["action"] else None,
            content=raw["content"],
            depth=raw["depth"],
            theorem_id=raw.get("theorem_id"),
            q_value=raw["q_value"],
            visit_count=raw["visit_count"],
            terminal=raw["terminal"],
            reward=raw.get("reward"),
            children=list(raw.get("children", [])),
        )
        tree.nodes.append(node)
    tree.ledger = [LedgerEntry(**raw) for raw in payload.get("ledger", [])]
    return tree


def dump_tree(tree: SearchTree, path: str | Path, config: MctsConfig | None = None) -> None:
    payload = tree_to_dict(tree, config)
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def load_tree(path: str | Path) -> SearchTree:
    return tree_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def check_tree_invariants(tree: SearchTree, max_depth: int | None = None) -> None:
    """Assert the structural invariants every finished tree must satisfy."""
    root = tree.node(tree.root)
    if root.parent is not None or root.depth != 0:
        raise AssertionError("root must have no parent and depth 0")
    for position, node in enumerate(tree.nodes):
        if node.node_id != position:
            raise AssertionError("node ids must match arena positions")
        if node.parent is not None:
            parent = tree.node(node.parent)
            if node.node_id not in parent.children:
                raise AssertionError(f"node {node.node_id} missing from parent's children")
            if node.depth != parent.depth + 1:
                raise AssertionError(f"node {node.node_id} has inconsistent depth")
            if node.visit_count > parent.visit_count:
                raise AssertionError(f"node {node.node_id} visited more than its parent")
        if node.terminal and node.children:
            raise AssertionError(f"terminal node {node.node_id} has children")
        if not 0.0 <= node.q_value <= node.visit_count + 1e-12:
            raise AssertionError(f"node {node.node_id} violates 0 <= Q <= N")
        if node.action is ActionKind.CRS and not node.terminal:
            raise AssertionError(f"CRS node {node.node_id} must be terminal")
        if node.action is ActionKind.RT and node.theorem_id is None:
            raise AssertionError(f"RT node {node.node_id} lacks a theorem id")
        if max_depth is not None and node.depth > max_depth:
            raise AssertionError(f"node {node.node_id} exceeds max depth {max_depth}")
