import { loadFixtureArtifacts } from "./fixture.js";
import { BackendError, FrameArtifacts } from "./types.js";

/** A backend turns a frame reference into per-frame artifacts.
 *  The fixture backend (precomputed artifacts on disk) is always available
 *  and deterministic; model backends wrapping depth / segmentation /
 *  detection networks are optional plugins registered at runtime. */
export type Backend = {
  name: string;
  capabilities: ReadonlyArray<"depth" | "segmentation" | "detection">;
  load(ref: string): FrameArtifacts;
};

export const fixtureBackend: Backend = {
  name: "fixture",
  capabilities: ["depth", "segmentation", "detection"],
  load: loadFixtureArtifacts,
};

const registry = new Map<string, Backend>([[fixtureBackend.name, fixtureBackend]]);

export function registerBackend(backend: Backend): void {
  registry.set(backend.name, backend);
}

export function getBackend(name: string): Backend {
  const backend = registry.get(name);
  if (!backend) {
    const known = [...registry.keys()].sort().join(", ");
    throw new BackendError(`no backend named "${name}" (available: ${known})`);
  }
  return backend;
}
