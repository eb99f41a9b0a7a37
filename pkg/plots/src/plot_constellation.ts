/**
 * Constellation scatter from one or more constellation.csv files.
 *
 *   node dist/plot_constellation.js --in constellation.csv --out figure.svg
 *
 * Markers are colored by the user-1 message label; passing --in twice
 * overlays the tables with distinct marker shapes.
 */

import { writeConstellationFigure } from './constellation.js';
import { parseCliOptions, runCli } from './cli.js';

runCli(() => {
    const options = parseCliOptions(
        process.argv.slice(2),
        'plot_constellation --in constellation.csv [--in more.csv] --out figure.svg',
    );
    return writeConstellationFigure(options);
});
