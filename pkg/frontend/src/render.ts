/**
 * Scene -> SVG DOM. Every rendered element carries its entity reference
 * in data attributes and shape classes (circle / double-circle /
 * rectangle / arrow / dashed-arrow) so tests and styles can address it.
 */
import {
  CanvasScene,
  COMPOSITE_OUTER,
  SceneNode,
  sceneBounds,
  STATE_RADIUS,
  TRANSITION_H,
  TRANSITION_W,
} from "./scene.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderHandlers {
  onNodeClick?: (node: SceneNode, event: MouseEvent) => void;
  onNodePointerDown?: (node: SceneNode, event: MouseEvent) => void;
  onCanvasClick?: (x: number, y: number, event: MouseEvent) => void;
}

function el(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function renderScene(svg: SVGSVGElement, scene: CanvasScene,
                            handlers: RenderHandlers = {}): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  const bounds = sceneBounds(scene);
  svg.setAttribute("viewBox",
                   `${bounds.minX} ${bounds.minY} ${bounds.width} ${bounds.height}`);

  const defs = el("defs", {});
  const marker = el("marker", {
    id: "arrowhead", viewBox: "0 0 10 10", refX: "9", refY: "5",
    markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
  });
  marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  svg.addEventListener("click", (event) => {
    if ((event.target as Element | null)?.closest?.("[data-id]")) return;
    handlers.onCanvasClick?.(
      (event as MouseEvent & { offsetX?: number }).offsetX ?? 0,
      (event as MouseEvent & { offsetY?: number }).offsetY ?? 0,
      event as MouseEvent);
  });

  for (const edge of scene.edges) {
    const group = el("g", {
      class: `edge ${edge.shape}` + (edge.ref ? " arc" : " boundary"),
      "data-key": edge.key,
    });
    if (edge.ref) group.setAttribute("data-id", edge.ref.id);
    const line = el("line", {
      x1: String(edge.x1), y1: String(edge.y1),
      x2: String(edge.x2), y2: String(edge.y2),
      stroke: "black", "marker-end": "url(#arrowhead)",
    });
    if (edge.shape === "dashed-arrow") line.setAttribute("stroke-dasharray", "6 4");
    group.appendChild(line);
    svg.appendChild(group);
  }

  for (const node of scene.nodes) {
    const classes = ["node", node.ref.kind, node.shape];
    if (node.selected) classes.push("selected");
    if (node.unsaved) classes.push("unsaved");
    const group = el("g", { class: classes.join(" "), "data-id": node.ref.id });

    if (node.shape === "rectangle") {
      group.appendChild(el("rect", {
        x: String(node.x - TRANSITION_W / 2), y: String(node.y - TRANSITION_H / 2),
        width: String(TRANSITION_W), height: String(TRANSITION_H),
        fill: "white", stroke: node.selected ? "orangered" : "black",
      }));
    } else {
      if (node.shape === "double-circle") {
        group.appendChild(el("circle", {
          cx: String(node.x), cy: String(node.y), r: String(COMPOSITE_OUTER),
          fill: "none", stroke: node.selected ? "orangered" : "darkgreen",
        }));
      }
      group.appendChild(el("circle", {
        cx: String(node.x), cy: String(node.y), r: String(STATE_RADIUS),
        fill: "palegreen", stroke: node.selected ? "orangered" : "darkgreen",
      }));
    }
    const label = el("text", {
      x: String(node.x), y: String(node.y + STATE_RADIUS + 14),
      "text-anchor": "middle", "font-size": "11",
    });
    label.textContent = node.label + (node.unsaved ? " *" : "");
    group.appendChild(label);

    group.addEventListener("click", (event) => {
      event.stopPropagation();
      handlers.onNodeClick?.(node, event as MouseEvent);
    });
    group.addEventListener("mousedown", (event) => {
      handlers.onNodePointerDown?.(node, event as MouseEvent);
    });
    svg.appendChild(group);
  }
}
