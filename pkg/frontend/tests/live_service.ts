// Spawns the real chat service (mock gateway) for end-to-end tests.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

const BUILD_SCRIPT = `
import json, sys, importlib.resources as ir
from duanzai.pinyin import default_lexicon
from duanzai.corpus import generate_synthetic, load_pairs, load_templates
from duanzai.crf import train, TrainConfig, save_model
from duanzai.retrieval import train_bigram_lm, save_lm

out = sys.argv[1]
lex = default_lexicon()
with ir.files("duanzai.data").joinpath("templates.txt").open() as fh:
    templates = load_templates(fh)
with ir.files("duanzai.data").joinpath("pun_pairs.tsv").open() as fh:
    pairs = load_pairs(fh)
model = train(generate_synthetic(templates[:8], pairs[:12], seed=42), lex, TrainConfig())
with open(out + "/model.json", "w") as fh:
    save_model(model, fh)
lm = train_bigram_lm([o for _, o in pairs], 0.1)
with open(out + "/lm.json", "w") as fh:
    save_lm(lm, fh)
with open(out + "/config.json", "w") as fh:
    json.dump({"crf_model": out + "/model.json", "lm": out + "/lm.json",
               "gateway_backend": "mock"}, fh)
print("ok")
`;

export interface LiveService {
  baseUrl: string;
  stop: () => void;
}

export async function startLiveService(): Promise<LiveService> {
  const dir = mkdtempSync(join(tmpdir(), "duanzai-ui-e2e-"));
  const build = spawnSync("python3", ["-c", BUILD_SCRIPT, dir], {
    encoding: "utf-8",
  });
  if (build.status !== 0) {
    throw new Error(`fixture build failed: ${build.stderr}`);
  }

  const port = 8900 + Math.floor(Math.random() * 900);
  const baseUrl = `http://127.0.0.1:${port}`;
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "duanzai.cli", "serve", "--config", `${dir}/config.json`,
     "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );

  const deadline = Date.now() + 45_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error("service did not come up within 45s");
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }

  return {
    baseUrl,
    stop: () => {
      child.kill("SIGTERM");
    },
  };
}
