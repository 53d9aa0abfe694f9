/* tslint:disable */
/* eslint-disable */

/**
 * Alpha implied by the ATM quote (in percent) at maturity `tau`.
 */
export function backed_out_alpha(beta: number, rho: number, nu: number, forward: number, atm_pct: number, tau: number): number;

/**
 * Undiscounted call price implied by one formula's smile.
 */
export function call_price(berestycki: boolean, beta: number, rho: number, nu: number, forward: number, atm_pct: number, tau: number, strike: number): number;

/**
 * Finite-difference density of the smile-implied call prices.
 */
export function density_curves(beta: number, rho: number, nu: number, forward: number, atm_pct: number, tau: number, k_min: number, k_max: number, count: number): Float64Array;

/**
 * Composite implied vols on `count` geometric strikes.
 */
export function smile_curves(beta: number, rho: number, nu: number, forward: number, atm_pct: number, tau: number, k_min: number, k_max: number, count: number): Float64Array;

/**
 * `T(K)` prices on `count` linear peaks with the 2% wing.
 */
export function triangle_curves(beta: number, rho: number, nu: number, forward: number, atm_pct: number, tau: number, peak_min: number, peak_max: number, count: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly backed_out_alpha: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly call_price: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly density_curves: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly smile_curves: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly triangle_curves: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
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
