/* tslint:disable */
/* eslint-disable */

/**
 * Orientation-averaged form factor at `points` evenly spaced
 * `s = sin(theta)/lambda` on `[0, s_max]` (1/angstrom).
 */
export function form_factor(z: number, n: number, config: string, s_max: number, points: number): Float64Array;

/**
 * `4 pi r^2 rho(r)` at `points` evenly spaced radii on `[0, r_max]`.
 */
export function radial_density(z: number, n: number, config: string, r_max: number, points: number): Float64Array;

/**
 * JSON summary: configuration, `A`, `B`, `Z*`, `E0` and the tabulated
 * neutral-atom values when they exist.
 */
export function solve(z: number, n: number, config: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly form_factor: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly radial_density: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly solve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
