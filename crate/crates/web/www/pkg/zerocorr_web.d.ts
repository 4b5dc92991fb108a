/* tslint:disable */
/* eslint-disable */

/**
 * κ_km sampled at `steps` evenly spaced r in [0, r_max], as interleaved (r, κ).
 */
export function kappa_curve(k: number, m: number, r_max: number, steps: number): Float64Array;

/**
 * Moduli of the scaled level-N Szegő kernel and of its Heisenberg limit
 * along the real axis, |K(0, x)| for x in [0, x_max], as interleaved
 * (x, scaled, limit).
 */
export function kernel_profile(level: number, x_max: number, steps: number): Float64Array;

/**
 * Roots of one sampled SU(2) polynomial, scaled by √N, as interleaved (re, im).
 * Only roots within `radius` of the origin in scaled units are returned.
 */
export function su2_roots(degree: number, seed: bigint, radius: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly kappa_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly kernel_profile: (a: number, b: number, c: number) => [number, number];
    readonly su2_roots: (a: number, b: bigint, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
