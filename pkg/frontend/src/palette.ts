// Concept colors, indexed by library position. Mirrors the server's SVG
// palette so client-rendered and server-rendered views agree.

export const PALETTE = [
	"#e6194b",
	"#3cb44b",
	"#4363d8",
	"#f58231",
	"#911eb4",
	"#42d4f4",
	"#f032e6",
	"#bfef45",
	"#fabed4",
	"#469990",
	"#9a6324",
	"#800000",
] as const;

export const UNASSIGNED_COLOR = "#888888";

export function conceptColor(libraryIndex: number | null | undefined): string {
	if (libraryIndex === null || libraryIndex === undefined || libraryIndex < 0) {
		return UNASSIGNED_COLOR;
	}
	return PALETTE[libraryIndex % PALETTE.length]!;
}
