// Typed client for the concept service. All bodies mirror the CLI file
// formats; the fetch function is injectable so tests can replay recorded
// responses.

import type { SketchJson } from "./schema.js";

export interface ParseResponse {
	schema_version: number;
	sketch: SketchJson;
	decomposition: { instances: unknown[]; cross_matrix: number[][] };
	provenance: { primitives: [number, number][]; constraints: [number, number][] };
	primitive_concepts: (number | null)[];
	residual_elements: number;
	warnings: string[];
	svg: string;
	report: {
		primitive_f: number;
		constraint_f: number;
		modularity_percent: number | null;
	};
}

export interface CandidateJson {
	sketch: SketchJson;
	concept_id: number;
	score: number | null;
	identity: boolean;
	added_primitives: number[];
	added_constraints: number[];
	primitive_concepts: (number | null)[];
	constraint_concepts: (number | null)[];
	svg?: string;
}

export interface CompleteResponse {
	schema_version: number;
	candidates: CandidateJson[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
	constructor(public status: number, message: string) {
		super(message);
	}
}

export class ServiceClient {
	constructor(
		private baseUrl: string,
		private fetchFn: FetchLike = (input, init) => fetch(input, init),
	) {}

	private async post<T>(path: string, body: unknown): Promise<T> {
		const resp = await this.fetchFn(this.baseUrl + path, {
			method: "POST",
			headers: { "content-type": "application/json" },
			body: JSON.stringify(body),
		});
		const payload = await resp.json();
		if (!resp.ok) {
			throw new ServiceError(resp.status, payload?.error ?? `HTTP ${resp.status}`);
		}
		return payload as T;
	}

	private async get<T>(path: string): Promise<T> {
		const resp = await this.fetchFn(this.baseUrl + path);
		const payload = await resp.json();
		if (!resp.ok) {
			throw new ServiceError(resp.status, payload?.error ?? `HTTP ${resp.status}`);
		}
		return payload as T;
	}

	parse(sketch: SketchJson): Promise<ParseResponse> {
		return this.post<ParseResponse>("/v1/parse", sketch);
	}

	complete(sketch: SketchJson, topK = 5): Promise<CompleteResponse> {
		return this.post<CompleteResponse>("/v1/complete", { ...sketch, top_k: topK });
	}

	library(): Promise<unknown> {
		return this.get("/v1/library");
	}

	stats(): Promise<unknown> {
		return this.get("/v1/stats");
	}

	async healthy(): Promise<boolean> {
		try {
			await this.get("/healthz");
			return true;
		} catch {
			return false;
		}
	}
}
