// Corpus JSON schema shared with the service. The document serializes to
// exactly this shape; quantization happens server-side only.

export type PrimitiveKind = "line" | "circle" | "point" | "arc";

export type ConstraintKind =
	| "coincident"
	| "distance"
	| "horizontal"
	| "parallel"
	| "vertical"
	| "tangent"
	| "length"
	| "perpendicular"
	| "equal"
	| "diameter"
	| "radius"
	| "angle"
	| "concentric"
	| "normal";

export interface PrimitiveJson {
	kind: PrimitiveKind;
	construction: boolean;
	params: number[];
	quantized?: number[];
}

export interface ConstraintJson {
	kind: ConstraintKind;
	refs: number[];
	param?: number;
}

export interface SketchJson {
	schema_version?: number;
	primitives: PrimitiveJson[];
	constraints: ConstraintJson[];
}

export const PRIMITIVE_PARAM_COUNT: Record<PrimitiveKind, number> = {
	line: 4, // start_x, start_y, end_x, end_y
	circle: 3, // center_x, center_y, radius
	point: 2,
	arc: 5, // center_x, center_y, radius, start_angle, end_angle
};

export const CONSTRAINT_ARITY: Record<ConstraintKind, number> = {
	coincident: 2,
	distance: 2,
	horizontal: 1,
	parallel: 2,
	vertical: 1,
	tangent: 2,
	length: 1,
	perpendicular: 2,
	equal: 2,
	diameter: 1,
	radius: 1,
	angle: 2,
	concentric: 2,
	normal: 2,
};

export const CONSTRAINT_KINDS = Object.keys(CONSTRAINT_ARITY) as ConstraintKind[];

// Client-side validation mirroring the server's checks; the service remains
// the authority, this only catches mistakes before a round trip.
export function validateSketch(sketch: SketchJson): string[] {
	const problems: string[] = [];
	sketch.primitives.forEach((p, i) => {
		const want = PRIMITIVE_PARAM_COUNT[p.kind];
		if (want === undefined) {
			problems.push(`primitive ${i}: unknown kind ${p.kind}`);
		} else if (p.params.length !== want) {
			problems.push(`primitive ${i}: ${p.kind} expects ${want} params, got ${p.params.length}`);
		}
		if (p.params.some((v) => !Number.isFinite(v))) {
			problems.push(`primitive ${i}: non-finite parameter`);
		}
	});
	sketch.constraints.forEach((c, i) => {
		const arity = CONSTRAINT_ARITY[c.kind];
		if (arity === undefined) {
			problems.push(`constraint ${i}: unknown kind ${c.kind}`);
			return;
		}
		if (c.refs.length !== arity) {
			problems.push(`constraint ${i}: ${c.kind} expects ${arity} refs, got ${c.refs.length}`);
		}
		for (const r of c.refs) {
			if (!Number.isInteger(r) || r < 0 || r >= sketch.primitives.length) {
				problems.push(`constraint ${i}: ref ${r} out of range`);
			}
		}
	});
	return problems;
}
