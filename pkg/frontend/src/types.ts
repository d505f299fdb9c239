/** Wire formats of the topoflow HTTP API. */

export interface ViewElement {
  id: number;
  kind: string; // start | final | activity | dot | object | class | circle
  name: string;
  owner?: number;
  dot_kind?: string;
  process?: number;
}

export interface ViewEdge {
  id: number;
  kind: string; // arc | association | pilot | flow_binding | instance_link
  from: number;
  to: number;
  dots?: number[];
  root?: boolean;
  parent?: number;
  multiplicity?: string;
}

export interface ViewStar {
  id: number;
  identity: number;
  name: string;
  circle: number;
}

export interface ViewDocument {
  version: string;
  view: string;
  show_stars: boolean;
  highlight: number[];
  elements: ViewElement[];
  edges: ViewEdge[];
  sim?: { stars: ViewStar[] };
}

export interface TraceEvent {
  time: number;
  seq: number;
  kind: string;
  token?: number;
  identity?: number;
  node?: number;
  circle?: number;
  star?: number;
  arc?: number;
  relation?: number;
  parent?: number;
  a?: number;
  b?: number;
  service?: number;
  pilot?: number;
  detail?: string;
}

export interface Finding {
  rule: string;
  severity: string;
  subject: number;
  message: string;
}

export type ViewKind = "object" | "process" | "merged";
