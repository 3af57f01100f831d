// Studio wiring: drawing tools, two-click constraint authoring, the
// suggestion flow, and concept-colored rendering.

import { ServiceClient } from "./api.js";
import { SuggestionFlow } from "./controller.js";
import { CanvasDocument } from "./document.js";
import { defaultViewport, renderDocument, toWorld } from "./render.js";
import { CONSTRAINT_ARITY, CONSTRAINT_KINDS, ConstraintKind, PrimitiveKind } from "./schema.js";

const SERVICE_URL = (window as { SERVICE_URL?: string }).SERVICE_URL ?? "http://127.0.0.1:8080";

type Tool = "line" | "circle" | "point" | "arc" | "constraint";

const canvas = document.getElementById("sketch") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const view = defaultViewport(canvas.width, canvas.height);
const statusEl = document.getElementById("status")!;
const constraintSelect = document.getElementById("constraint-kind") as HTMLSelectElement;

const doc = new CanvasDocument();
const client = new ServiceClient(SERVICE_URL);
const flow = new SuggestionFlow(client, (state) => {
	if (state.tag === "preview") {
		setStatus(`suggestion ${state.index + 1}/${state.total}: accept or cycle`);
	} else if (state.tag === "loading") {
		setStatus("completing...");
	} else if (state.tag === "empty") {
		setStatus("no completion candidates");
	} else if (state.tag === "error") {
		setStatus(`error: ${state.message}`);
	}
	redraw();
});

let tool: Tool = "line";
let pendingPoint: [number, number] | null = null;
let pendingRef: number | null = null;

for (const kind of CONSTRAINT_KINDS) {
	const option = document.createElement("option");
	option.value = kind;
	option.textContent = `${kind} (${CONSTRAINT_ARITY[kind]})`;
	constraintSelect.appendChild(option);
}

function setStatus(text: string): void {
	statusEl.textContent = text;
}

function redraw(): void {
	renderDocument(ctx, view, doc, flow.current);
}

function edited(): void {
	flow.invalidate();
	updateButtons();
	redraw();
}

function nearestPrimitive(x: number, y: number): number | null {
	let best: number | null = null;
	let bestDist = 0.1;
	doc.primitives.forEach((p, i) => {
		const v = p.params;
		let d: number;
		if (p.kind === "line") {
			d = pointSegmentDistance(x, y, v[0]!, v[1]!, v[2]!, v[3]!);
		} else if (p.kind === "point") {
			d = Math.hypot(x - v[0]!, y - v[1]!);
		} else {
			d = Math.abs(Math.hypot(x - v[0]!, y - v[1]!) - v[2]!);
		}
		if (d < bestDist) {
			best = i;
			bestDist = d;
		}
	});
	return best;
}

function pointSegmentDistance(
	px: number, py: number, x0: number, y0: number, x1: number, y1: number,
): number {
	const dx = x1 - x0;
	const dy = y1 - y0;
	const len2 = dx * dx + dy * dy || 1;
	const t = Math.max(0, Math.min(1, ((px - x0) * dx + (py - y0) * dy) / len2));
	return Math.hypot(px - (x0 + t * dx), py - (y0 + t * dy));
}

canvas.addEventListener("click", (event) => {
	const rect = canvas.getBoundingClientRect();
	const [x, y] = toWorld(view, event.clientX - rect.left, event.clientY - rect.top);
	if (tool === "point") {
		doc.addPrimitive("point", [x, y]);
		edited();
		return;
	}
	if (tool === "constraint") {
		const hit = nearestPrimitive(x, y);
		if (hit === null) {
			setStatus("no primitive near the click");
			return;
		}
		const kind = constraintSelect.value as ConstraintKind;
		doc.selection = pendingRef === null ? [hit] : [pendingRef, hit];
		if (CONSTRAINT_ARITY[kind] === 1) {
			doc.addConstraint(kind, [hit]);
			doc.selection = [];
			edited();
		} else if (pendingRef === null) {
			pendingRef = hit;
			setStatus(`${kind}: pick the second primitive`);
			redraw();
		} else {
			doc.addConstraint(kind, [pendingRef, hit]);
			pendingRef = null;
			doc.selection = [];
			edited();
		}
		return;
	}
	// two-click geometry tools
	if (pendingPoint === null) {
		pendingPoint = [x, y];
		setStatus(`${tool}: pick the second point`);
		return;
	}
	const [x0, y0] = pendingPoint;
	pendingPoint = null;
	if (tool === "line") {
		doc.addPrimitive("line", [x0, y0, x, y]);
	} else if (tool === "circle") {
		doc.addPrimitive("circle", [x0, y0, Math.hypot(x - x0, y - y0)]);
	} else {
		const r = Math.hypot(x - x0, y - y0);
		doc.addPrimitive("arc", [x0, y0, r, 0, Math.atan2(y - y0, x - x0)]);
	}
	edited();
});

function bindTool(id: string, value: Tool): void {
	document.getElementById(id)!.addEventListener("click", () => {
		tool = value;
		pendingPoint = null;
		pendingRef = null;
		setStatus(`tool: ${value}`);
	});
}

bindTool("tool-line", "line");
bindTool("tool-circle", "circle");
bindTool("tool-point", "point");
bindTool("tool-arc", "arc");
bindTool("tool-constraint", "constraint");

document.getElementById("parse")!.addEventListener("click", async () => {
	const problems = doc.validate();
	if (problems.length > 0) {
		setStatus(`invalid: ${problems[0]}`);
		return;
	}
	setStatus("parsing...");
	try {
		doc.lastParse = await client.parse(doc.serialize());
		const mod = doc.lastParse.report.modularity_percent;
		setStatus(
			`parsed: ${doc.lastParse.residual_elements} residual elements` +
			(mod === null ? "" : `, modularity ${mod.toFixed(0)}%`),
		);
	} catch (err) {
		setStatus(`parse failed: ${err instanceof Error ? err.message : err}`);
	}
	redraw();
});

const completeButton = document.getElementById("complete") as HTMLButtonElement;
completeButton.addEventListener("click", () => void flow.request(doc));

document.getElementById("accept")!.addEventListener("click", async () => {
	const accepted = flow.accept(doc);
	if (!accepted) {
		return;
	}
	try {
		doc.lastParse = await client.parse(doc.serialize());
	} catch {
		doc.lastParse = null;
	}
	setStatus("suggestion accepted");
	updateButtons();
	redraw();
});

document.getElementById("reject")!.addEventListener("click", () => flow.reject());

document.getElementById("undo")!.addEventListener("click", () => {
	if (doc.undo()) {
		flow.invalidate();
		setStatus("undone");
	}
	updateButtons();
	redraw();
});

function updateButtons(): void {
	completeButton.disabled = doc.primitives.length === 0;
}

void client.healthy().then((ok) => {
	if (!ok) {
		completeButton.disabled = true;
		setStatus(`service offline at ${SERVICE_URL}`);
	} else {
		setStatus("ready");
	}
});

updateButtons();
redraw();
