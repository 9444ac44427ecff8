"""Write the 12-class airline mini-fixture used by the tests.

Three intended services: customer (5 classes), flight (4), booking (3).
Calls are hand-written, mostly inside each service with a few cross calls.
"""
import sys
from pathlib import Path

import numpy as np

from monosplit.ingest import write_call_matrix
from monosplit.model import CallMatrix

CLASSES = [
    # customer
    "com.acme.customer.CustomerController",
    "com.acme.customer.CustomerService",
    "com.acme.customer.CustomerRepository",
    "com.acme.customer.Customer",
    "com.acme.customer.CustomerAddress",
    # flight
    "com.acme.flight.FlightController",
    "com.acme.flight.FlightService",
    "com.acme.flight.FlightRepository",
    "com.acme.flight.Flight",
    # booking
    "com.acme.booking.BookingController",
    "com.acme.booking.BookingService",
    "com.acme.booking.Booking",
]

CALLS = {
    ("CustomerController", "CustomerService"): 6,
    ("CustomerService", "CustomerRepository"): 5,
    ("CustomerService", "Customer"): 4,
    ("CustomerRepository", "Customer"): 3,
    ("Customer", "CustomerAddress"): 2,
    ("CustomerService", "CustomerAddress"): 2,
    ("CustomerController", "Customer"): 1,
    ("FlightController", "FlightService"): 5,
    ("FlightService", "FlightRepository"): 4,
    ("FlightService", "Flight"): 3,
    ("FlightRepository", "Flight"): 3,
    ("FlightController", "Flight"): 1,
    ("BookingController", "BookingService"): 4,
    ("BookingService", "Booking"): 3,
    ("BookingController", "Booking"): 1,
    # cross-service
    ("BookingService", "CustomerService"): 1,
    ("BookingService", "FlightService"): 2,
    ("Booking", "Flight"): 1,
}

TOKENS = {
    "CustomerController": "customerInfo;getCustomer;updateCustomerProfile;loginSession;HttpRequest",
    "CustomerService": "customerProfile;findCustomerById;validateLogin;sessionToken;updateAddress",
    "CustomerRepository": "customerTable;saveCustomer;findCustomerByEmail;persistAddress",
    "Customer": "customerId;emailAddress;phoneNumber;memberStatus;totalMiles",
    "CustomerAddress": "streetAddress;postalCode;cityName;stateProvince;country",
    "FlightController": "flightSearch;getFlightSchedule;airportCode;departureDate",
    "FlightService": "findFlightSegments;flightSchedule;airportCodeMapping;departureTime",
    "FlightRepository": "flightTable;saveFlight;findFlightBySegment;scheduleCache",
    "Flight": "flightId;flightSegment;departureTime;arrivalTime;airportCode;seatsAvailable",
    "BookingController": "bookFlight;cancelBooking;bookingInfo;HttpRequest",
    "BookingService": "bookingId;createBooking;cancelBookingById;flightSegment;customerId",
    "Booking": "bookingId;bookingDate;seatClass;customerId;flightId",
}


def main(out="tests/fixtures/mini"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    short = [c.rsplit(".", 1)[1] for c in CLASSES]
    m = np.zeros((len(CLASSES), len(CLASSES)), dtype=np.int64)
    for (a, b), k in CALLS.items():
        m[short.index(a), short.index(b)] = k
    write_call_matrix(CallMatrix(tuple(CLASSES), m), out / "calls.csv")
    with open(out / "tokens.csv", "w") as fh:
        fh.write("class,words\n")
        for cls, s in zip(CLASSES, short):
            fh.write(f"{cls},{TOKENS[s]}\n")
    with open(out / "intended.json", "w") as fh:
        import json
        groups = {"customer": CLASSES[:5], "flight": CLASSES[5:9], "booking": CLASSES[9:]}
        fh.write(json.dumps({"source": "external", "services": groups}, indent=2) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:])
