// Suggestion flow: request -> ghost preview -> accept or cycle.
// DOM-free so the whole loop is unit-testable; at most one request is in
// flight per document and new edits invalidate stale responses.

import type { CandidateJson, ServiceClient } from "./api.js";
import { ServiceError } from "./api.js";
import type { CanvasDocument } from "./document.js";

export type FlowState =
	| { tag: "idle" }
	| { tag: "loading" }
	| { tag: "preview"; candidate: CandidateJson; index: number; total: number }
	| { tag: "empty" }
	| { tag: "error"; message: string };

export class SuggestionFlow {
	state: FlowState = { tag: "idle" };
	private candidates: CandidateJson[] = [];
	private index = 0;
	private generation = 0;

	constructor(
		private client: ServiceClient,
		private onChange: (state: FlowState) => void = () => {},
	) {}

	private setState(state: FlowState): void {
		this.state = state;
		this.onChange(state);
	}

	// Any edit invalidates in-flight and previewed suggestions.
	invalidate(): void {
		this.generation += 1;
		this.candidates = [];
		this.index = 0;
		this.setState({ tag: "idle" });
	}

	async request(doc: CanvasDocument, topK = 5): Promise<void> {
		const problems = doc.validate();
		if (problems.length > 0) {
			this.setState({ tag: "error", message: problems[0]! });
			return;
		}
		if (doc.primitives.length === 0) {
			this.setState({ tag: "empty" });
			return;
		}
		const generation = ++this.generation;
		this.setState({ tag: "loading" });
		let candidates: CandidateJson[];
		try {
			const response = await this.client.complete(doc.serialize(), topK);
			candidates = response.candidates;
		} catch (err) {
			if (generation === this.generation) {
				const message = err instanceof ServiceError ? err.message : "service unreachable";
				this.setState({ tag: "error", message });
			}
			return;
		}
		if (generation !== this.generation) {
			return; // the document changed while we waited
		}
		doc.lastCandidates = candidates;
		this.candidates = candidates.filter((c) => !c.identity);
		this.index = 0;
		if (this.candidates.length === 0) {
			this.setState({ tag: "empty" });
		} else {
			this.preview();
		}
	}

	private preview(): void {
		this.setState({
			tag: "preview",
			candidate: this.candidates[this.index]!,
			index: this.index,
			total: this.candidates.length,
		});
	}

	get current(): CandidateJson | null {
		return this.state.tag === "preview" ? this.state.candidate : null;
	}

	// Merge the previewed candidate into the document. The caller usually
	// re-parses afterwards for fresh concept colors.
	accept(doc: CanvasDocument): CandidateJson | null {
		const candidate = this.current;
		if (!candidate) {
			return null;
		}
		doc.mergeCandidate(candidate);
		this.generation += 1;
		this.candidates = [];
		this.setState({ tag: "idle" });
		return candidate;
	}

	// Cycle to the next candidate, wrapping around.
	reject(): void {
		if (this.state.tag !== "preview" || this.candidates.length === 0) {
			return;
		}
		this.index = (this.index + 1) % this.candidates.length;
		this.preview();
	}
}
