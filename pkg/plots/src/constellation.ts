/**
 * Constellation scatter over constellation.csv tables.
 *
 * Plots (dim_0, dim_1) of every codeword, colored by the user-1 message
 * label s1, so the clusters the strong user must separate are visible.
 * Several tables (e.g. checkpoints trained at different loss weights)
 * overlay in one figure with one marker shape per table.
 */

import { basename } from 'node:path';
import { scaleLinear } from 'd3-scale';
import { ConstellationTable, loadConstellationTable } from './table.js';
import { PALETTE, esc, svgDocument, tag, writeImage } from './svg.js';

export interface ConstellationSpec {
    inputs: string[];
    output: string;
    /** defaults to the symmetric square [-2, 2] on both axes */
    xRange?: [number, number];
    yRange?: [number, number];
    /** legend name per input table; defaults to the file name */
    labels?: string[];
    title?: string;
    width?: number;
    height?: number;
}

const MARGIN = { top: 34, right: 20, bottom: 46, left: 56 };
const MARKER_SIZE = 4.5;

function marker(
    shape: string,
    cx: number,
    cy: number,
    color: string,
    table: number,
    cls = 'pt',
): string {
    const r = MARKER_SIZE;
    const common = { class: cls, 'data-table': table, stroke: color, 'stroke-width': 1.4 };
    switch (shape) {
        case 'circle':
            return tag('circle', { ...common, cx, cy, r, fill: color });
        case 'square':
            return tag('rect', {
                ...common, x: cx - r, y: cy - r, width: 2 * r, height: 2 * r, fill: 'none',
            });
        case 'diamond':
            return tag('path', {
                ...common, fill: 'none',
                d: `M ${(cx - r).toFixed(2)} ${cy.toFixed(2)} L ${cx.toFixed(2)} ${(cy - r).toFixed(2)} ` +
                   `L ${(cx + r).toFixed(2)} ${cy.toFixed(2)} L ${cx.toFixed(2)} ${(cy + r).toFixed(2)} Z`,
            });
        default:
            return tag('path', {
                ...common, fill: 'none',
                d: `M ${(cx - r).toFixed(2)} ${(cy - r).toFixed(2)} L ${(cx + r).toFixed(2)} ${(cy + r).toFixed(2)} ` +
                   `M ${(cx - r).toFixed(2)} ${(cy + r).toFixed(2)} L ${(cx + r).toFixed(2)} ${(cy - r).toFixed(2)}`,
            });
    }
}

const SHAPES = ['circle', 'square', 'diamond', 'cross'];

export function renderConstellationFigure(
    tables: ConstellationTable[],
    spec: ConstellationSpec,
): string {
    if (tables.length === 0) {
        throw new Error('no constellation table given');
    }
    const width = spec.width ?? 520;
    const height = spec.height ?? 520;
    const innerW = width - MARGIN.left - MARGIN.right;
    const innerH = height - MARGIN.top - MARGIN.bottom;

    const xDomain = spec.xRange ?? [-2, 2];
    const yDomain = spec.yRange ?? [-2, 2];
    const xScale = scaleLinear().domain(xDomain).range([MARGIN.left, MARGIN.left + innerW]);
    const yScale = scaleLinear().domain(yDomain).range([MARGIN.top + innerH, MARGIN.top]);

    const body: string[] = [];

    for (const t of yScale.ticks(5)) {
        const py = yScale(t);
        body.push(tag('line', {
            x1: MARGIN.left, x2: MARGIN.left + innerW, y1: py, y2: py,
            stroke: t === 0 ? '#aaaaaa' : '#dddddd', 'stroke-width': t === 0 ? 1 : 0.7,
        }));
        body.push(tag('text', {
            x: MARGIN.left - 7, y: py + 4, 'text-anchor': 'end', 'font-size': 11,
        }, esc(String(t))));
    }
    for (const t of xScale.ticks(5)) {
        const px = xScale(t);
        body.push(tag('line', {
            x1: px, x2: px, y1: MARGIN.top, y2: MARGIN.top + innerH,
            stroke: t === 0 ? '#aaaaaa' : '#dddddd', 'stroke-width': t === 0 ? 1 : 0.7,
        }));
        body.push(tag('text', {
            x: px, y: MARGIN.top + innerH + 16, 'text-anchor': 'middle', 'font-size': 11,
        }, esc(String(t))));
    }
    body.push(tag('rect', {
        x: MARGIN.left, y: MARGIN.top, width: innerW, height: innerH,
        fill: 'none', stroke: '#333333',
    }));

    const s1Values = [...new Set(tables.flatMap(t => t.points.map(p => p.labels[0])))].sort((a, b) => a - b);
    const colorOf = new Map(s1Values.map((v, i) => [v, PALETTE[i % PALETTE.length]]));

    tables.forEach((table, ti) => {
        const shape = SHAPES[ti % SHAPES.length];
        for (const p of table.points) {
            body.push(marker(
                shape,
                xScale(p.coords[0]),
                yScale(p.coords[1]),
                colorOf.get(p.labels[0])!,
                ti,
            ));
        }
    });

    let ly = MARGIN.top + 10;
    const lx = MARGIN.left + 10;
    for (const v of s1Values) {
        body.push(tag('circle', {
            class: 'legend-color', cx: lx, cy: ly - 3, r: 4, fill: colorOf.get(v)!,
        }));
        body.push(tag('text', { x: lx + 10, y: ly, 'font-size': 11 }, esc(`s1 = ${v}`)));
        ly += 15;
    }
    ly += 4;
    tables.forEach((table, ti) => {
        const label = spec.labels?.[ti] ?? basename(table.path, '.csv');
        body.push(marker(SHAPES[ti % SHAPES.length], lx, ly - 3, '#555555', ti, 'legend-marker'));
        body.push(tag('text', {
            x: lx + 10, y: ly, 'font-size': 11, fill: '#555555',
        }, esc(label)));
        ly += 15;
    });

    body.push(tag('text', {
        x: MARGIN.left + innerW / 2, y: height - 10, 'text-anchor': 'middle', 'font-size': 12,
    }, 'dim 0'));
    body.push(tag('text', {
        x: 16, y: MARGIN.top + innerH / 2, 'text-anchor': 'middle', 'font-size': 12,
        transform: `rotate(-90 16 ${(MARGIN.top + innerH / 2).toFixed(2)})`,
    }, 'dim 1'));
    if (spec.title) {
        body.push(tag('text', {
            x: width / 2, y: 20, 'text-anchor': 'middle', 'font-size': 13,
        }, esc(spec.title)));
    }

    return svgDocument(width, height, body);
}

/** Load every input table, render, and atomically write the image. */
export function writeConstellationFigure(spec: ConstellationSpec): { output: string; points: number } {
    if (spec.inputs.length === 0) {
        throw new Error('no input CSV given');
    }
    const tables = spec.inputs.map(loadConstellationTable);
    const svg = renderConstellationFigure(tables, spec);
    writeImage(spec.output, svg);
    return {
        output: spec.output,
        points: tables.reduce((n, t) => n + t.points.length, 0),
    };
}
