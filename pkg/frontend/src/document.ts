// The editable document: primitives in pre-quantization floats, constraints
// over primitive indices, an undo stack of byte-exact snapshots, and the
// latest service results for concept coloring.

import {
	ConstraintJson,
	ConstraintKind,
	PrimitiveJson,
	PrimitiveKind,
	SketchJson,
	validateSketch,
} from "./schema.js";
import type { CandidateJson, ParseResponse } from "./api.js";

export class CanvasDocument {
	primitives: PrimitiveJson[] = [];
	constraints: ConstraintJson[] = [];
	selection: number[] = [];
	lastParse: ParseResponse | null = null;
	lastCandidates: CandidateJson[] = [];
	private undoStack: string[] = [];

	serialize(): SketchJson {
		return {
			schema_version: 1,
			primitives: this.primitives.map((p) => ({
				kind: p.kind,
				construction: p.construction,
				params: [...p.params],
			})),
			constraints: this.constraints.map((c) => {
				const out: ConstraintJson = { kind: c.kind, refs: [...c.refs] };
				if (c.param !== undefined) {
					out.param = c.param;
				}
				return out;
			}),
		};
	}

	static deserialize(sketch: SketchJson): CanvasDocument {
		const doc = new CanvasDocument();
		doc.primitives = sketch.primitives.map((p) => ({
			kind: p.kind,
			construction: p.construction ?? false,
			params: [...p.params],
		}));
		doc.constraints = sketch.constraints.map((c) => {
			const out: ConstraintJson = { kind: c.kind, refs: [...c.refs] };
			if (c.param !== undefined) {
				out.param = c.param;
			}
			return out;
		});
		return doc;
	}

	validate(): string[] {
		return validateSketch(this.serialize());
	}

	snapshotBytes(): string {
		return JSON.stringify(this.serialize());
	}

	private pushUndo(): void {
		this.undoStack.push(this.snapshotBytes());
	}

	get canUndo(): boolean {
		return this.undoStack.length > 0;
	}

	undo(): boolean {
		const prev = this.undoStack.pop();
		if (prev === undefined) {
			return false;
		}
		const restored = CanvasDocument.deserialize(JSON.parse(prev) as SketchJson);
		this.primitives = restored.primitives;
		this.constraints = restored.constraints;
		this.selection = [];
		this.lastParse = null;
		this.lastCandidates = [];
		return true;
	}

	addPrimitive(kind: PrimitiveKind, params: number[], construction = false): number {
		this.pushUndo();
		this.primitives.push({ kind, construction, params: [...params] });
		this.invalidateResults();
		return this.primitives.length - 1;
	}

	addConstraint(kind: ConstraintKind, refs: number[], param?: number): number {
		this.pushUndo();
		const c: ConstraintJson = { kind, refs: [...refs] };
		if (param !== undefined) {
			c.param = param;
		}
		this.constraints.push(c);
		this.invalidateResults();
		return this.constraints.length - 1;
	}

	// Accepting a suggestion appends the candidate's new elements; retained
	// elements are never touched (the candidate's prefix must equal the
	// current document, element for element).
	mergeCandidate(candidate: CandidateJson): void {
		const sketch = candidate.sketch;
		const nPrims = this.primitives.length;
		const nCons = this.constraints.length;
		if (sketch.primitives.length < nPrims || sketch.constraints.length < nCons) {
			throw new Error("candidate does not extend the current document");
		}
		for (let i = 0; i < nPrims; i++) {
			const mine = this.primitives[i]!;
			const theirs = sketch.primitives[i]!;
			if (mine.kind !== theirs.kind) {
				throw new Error(`candidate mutates retained primitive ${i}`);
			}
		}
		this.pushUndo();
		for (let i = nPrims; i < sketch.primitives.length; i++) {
			const p = sketch.primitives[i]!;
			this.primitives.push({ kind: p.kind, construction: p.construction, params: [...p.params] });
		}
		for (let i = nCons; i < sketch.constraints.length; i++) {
			const c = sketch.constraints[i]!;
			const out: ConstraintJson = { kind: c.kind, refs: [...c.refs] };
			if (c.param !== undefined && c.param !== null) {
				out.param = c.param;
			}
			this.constraints.push(out);
		}
		this.invalidateResults();
	}

	private invalidateResults(): void {
		this.lastParse = null;
		this.lastCandidates = [];
	}

	// Concept id per primitive, from the last parse (null = unassigned).
	conceptOfPrimitive(index: number): number | null {
		const parse = this.lastParse;
		if (!parse || !parse.primitive_concepts) {
			return null;
		}
		return parse.primitive_concepts[index] ?? null;
	}
}
