/**
 * Minimal SVG document builder. No DOM, no randomness, no timestamps, so a
 * given figure always serializes to the same bytes.
 */

import { mkdirSync, renameSync, writeFileSync } from 'node:fs';
import { dirname } from 'node:path';

export function esc(text: string): string {
    return text
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}

/** Format an attribute value; numbers get a short stable representation. */
function attrValue(value: string | number): string {
    if (typeof value === 'number') {
        return Number.isInteger(value) ? String(value) : value.toFixed(2);
    }
    return value;
}

export function tag(
    name: string,
    attrs: Record<string, string | number>,
    children?: string[] | string,
): string {
    const parts = Object.entries(attrs)
        .map(([k, v]) => ` ${k}="${esc(attrValue(v))}"`)
        .join('');
    if (children === undefined) {
        return `<${name}${parts}/>`;
    }
    const body = Array.isArray(children) ? children.join('') : children;
    return `<${name}${parts}>${body}</${name}>`;
}

export function svgDocument(width: number, height: number, body: string[]): string {
    const head = tag('rect', { x: 0, y: 0, width, height, fill: 'white' });
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
        head,
        ...body,
        '</svg>',
        '',
    ].join('\n');
}

/**
 * Write the rendered document through a temporary file in the same directory,
 * so an interrupted run never leaves a partial image at the target path.
 */
export function writeImage(path: string, content: string): void {
    mkdirSync(dirname(path), { recursive: true });
    const temp = path + '.tmp';
    writeFileSync(temp, content, 'utf8');
    renameSync(temp, path);
}

/** Categorical palette; series keep stable colors by sorted group order. */
export const PALETTE = [
    '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728',
    '#9467bd', '#8c564b', '#e377c2', '#7f7f7f',
    '#bcbd22', '#17becf',
];
