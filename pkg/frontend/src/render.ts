// Canvas rendering: primitives colored by their concept from the last
// parse, ghost geometry for the previewed suggestion, selection rings.

import type { CandidateJson } from "./api.js";
import type { CanvasDocument } from "./document.js";
import { conceptColor } from "./palette.js";
import type { PrimitiveJson } from "./schema.js";

export interface Viewport {
	width: number;
	height: number;
	scale: number; // pixels per world unit
	centerX: number;
	centerY: number;
}

export function defaultViewport(width: number, height: number): Viewport {
	return { width, height, scale: Math.min(width, height) / 2.4, centerX: 0, centerY: 0 };
}

export function toScreen(view: Viewport, x: number, y: number): [number, number] {
	return [
		view.width / 2 + (x - view.centerX) * view.scale,
		view.height / 2 - (y - view.centerY) * view.scale,
	];
}

export function toWorld(view: Viewport, px: number, py: number): [number, number] {
	return [
		(px - view.width / 2) / view.scale + view.centerX,
		-(py - view.height / 2) / view.scale + view.centerY,
	];
}

function strokePrimitive(
	ctx: CanvasRenderingContext2D,
	view: Viewport,
	p: PrimitiveJson,
): void {
	const v = p.params;
	ctx.beginPath();
	if (p.kind === "line") {
		const [x0, y0] = toScreen(view, v[0]!, v[1]!);
		const [x1, y1] = toScreen(view, v[2]!, v[3]!);
		ctx.moveTo(x0, y0);
		ctx.lineTo(x1, y1);
	} else if (p.kind === "point") {
		const [x, y] = toScreen(view, v[0]!, v[1]!);
		ctx.arc(x, y, 3, 0, 2 * Math.PI);
	} else if (p.kind === "circle") {
		const [x, y] = toScreen(view, v[0]!, v[1]!);
		ctx.arc(x, y, v[2]! * view.scale, 0, 2 * Math.PI);
	} else {
		const [x, y] = toScreen(view, v[0]!, v[1]!);
		// canvas angles run clockwise in screen space; world is y-up
		ctx.arc(x, y, v[2]! * view.scale, -v[4]!, -v[3]!);
	}
	ctx.stroke();
}

export function renderDocument(
	ctx: CanvasRenderingContext2D,
	view: Viewport,
	doc: CanvasDocument,
	ghost: CandidateJson | null = null,
): void {
	ctx.clearRect(0, 0, view.width, view.height);
	ctx.lineWidth = 2;
	doc.primitives.forEach((p, i) => {
		ctx.setLineDash(p.construction ? [6, 4] : []);
		ctx.strokeStyle = ctx.fillStyle = conceptColor(doc.conceptOfPrimitive(i));
		if (doc.selection.includes(i)) {
			ctx.lineWidth = 4;
		}
		strokePrimitive(ctx, view, p);
		ctx.lineWidth = 2;
	});
	if (ghost) {
		ctx.save();
		ctx.globalAlpha = 0.45;
		ctx.setLineDash([4, 4]);
		ctx.strokeStyle = ctx.fillStyle = conceptColor(ghost.concept_id);
		for (const i of ghost.added_primitives) {
			const p = ghost.sketch.primitives[i];
			if (p) {
				strokePrimitive(ctx, view, p);
			}
		}
		ctx.restore();
	}
	ctx.setLineDash([]);
}
