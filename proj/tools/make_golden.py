#!/usr/bin/env python3
"""Regenerates the protocol golden transcripts under tests/golden.

Requests come from a scripted-policy rollout plus a fixed set of invalid,
malformed and out-of-order requests; responses are recorded from
`envforge serve --transport stdio`.
"""

import argparse
import json
import os
import subprocess
from pathlib import Path

POLICIES = {"sokoban": "sokoban_bfs", "house": "house_greedy", "shop": "shop_greedy"}
SUITE_SEED = 11


def scripted_episode(cli, env):
    out = subprocess.run(
        [cli, "rollout", "--env", env, "--policy", POLICIES[env], "--episodes", "1",
         "--seed", str(SUITE_SEED), "--out", "-"],
        check=True, capture_output=True, text=True).stdout
    return json.loads(out.splitlines()[0])


def requests_for(cli, env):
    traj = scripted_episode(cli, env)
    reqs = [
        {"id": 1, "op": "spec"},
        {"id": 2, "op": "reset", "env": env, "seed": traj["seed"],
         "augment": {"epsilon": 80, "prob": 1.0, "alpha": 0.5, "seed": 7}},
        {"id": 3, "op": "step", "session": "s1", "response": "<think>try</think><action>fly away</action>"},
        {"id": 4, "op": "step", "session": "s1", "response": "no tags at all"},
    ]
    for step in traj["steps"]:
        reqs.append({"id": len(reqs) + 1, "op": "step", "session": "s1", "response": step["action_raw"]})
    reqs += [
        {"id": len(reqs) + 1, "op": "step", "session": "s1", "response": "<think>x</think><action>up</action>"},
        {"id": len(reqs) + 2, "op": "close", "session": "s1"},
        {"id": len(reqs) + 3, "op": "step", "session": "s1", "response": "<action>up</action>"},
        {"id": len(reqs) + 4, "op": "reset", "env": "nowhere"},
    ]
    lines = [json.dumps(r, separators=(",", ":")) for r in reqs]
    lines.append("{broken")
    return "\n".join(lines) + "\n"


def main():
    root = Path(__file__).resolve().parent.parent
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cli", default=str(root / "build" / "tools" / "envforge"))
    parser.add_argument("--out", default=str(root / "tests" / "golden"))
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    env_vars = dict(os.environ, ENVFORGE_SEED="0")
    for env in POLICIES:
        requests = requests_for(args.cli, env)
        (out_dir / f"{env}.requests.jsonl").write_text(requests)
        responses = subprocess.run([args.cli, "serve", "--transport", "stdio"], input=requests,
                                   check=True, capture_output=True, text=True, env=env_vars).stdout
        (out_dir / f"{env}.responses.jsonl").write_text(responses)
        print(f"{env}: {len(requests.splitlines())} requests")


if __name__ == "__main__":
    main()
